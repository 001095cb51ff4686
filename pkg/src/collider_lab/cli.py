"""Command-line front end: ``compute``, ``sweep``, ``mc-check`` and ``plot``.

Exit codes: 0 ok, 1 Monte Carlo tolerance failure, 2 usage or validation
error, 3 degenerate model (zero-probability conditioning, undefined odds
ratio, too few Monte Carlo samples in a subset).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

from . import mc
from .estimands import ESTIMANDS, EstimandReport, report
from .plot import line_chart
from .scm import COEFFICIENTS, DegenerateModelError, InvalidParameterError, ScmParams
from .sweep import PRESETS, SweepRow, preset_spec, run_sweep, SweepSpec, DEFAULT_STEPS

EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3
SEED_ENV = "COLLIDER_LAB_SEED"

CSV_HEADER = (
    "param,value,delta_as,delta_sp,delta_ce,delta_cde,delta_cde_m1,delta_cde_a1m1,"
    "or_as,or_sp,or_ce,or_cde,or_cde_m1,or_cde_a1m1,p_m1,p_y1"
)
CSV_FIELDS = CSV_HEADER.split(",")

PARAM_KEYS = ("p_A", "p_U") + COEFFICIENTS + ("nu", "alpha_0", "beta_0")
# settings a config file may carry besides model parameters
SETTING_KEYS = ("preset", "vary", "from", "to", "steps", "n", "seed", "tol", "format", "out", "svg", "workers")
_INT_SETTINGS = {"steps", "n", "seed", "workers"}
_FLOAT_SETTINGS = {"from", "to", "tol"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: Dict[str, float] = field(default_factory=dict)
    settings: Dict[str, object] = field(default_factory=dict)

    def setting(self, key, default=None):
        return self.settings.get(key, default)


def flag_name(key: str) -> str:
    return "--" + key.lower().replace("_", "-")


# ---------------------------------------------------------------- config files


def _coerce(key: str, raw: str):
    if key in PARAM_KEYS:
        return float(raw)
    if key in _INT_SETTINGS:
        return int(raw)
    if key in _FLOAT_SETTINGS:
        return float(raw)
    return raw


def parse_config_text(text: str) -> Dict[str, object]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        canonical = _canonical_key(key)
        if canonical is None:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[canonical] = _coerce(canonical, raw)
        except ValueError:
            raise UsageError(f"config line {lineno}: bad value {raw!r} for {key}") from None
    return values


def _canonical_key(key: str) -> Optional[str]:
    lowered = key.lower().replace("-", "_")
    for k in PARAM_KEYS + SETTING_KEYS:
        if k.lower() == lowered:
            return k
    return None


def format_config(cfg: RunConfig) -> str:
    lines = [f"# collider-lab {cfg.command} configuration"]
    for key in PARAM_KEYS:
        if key in cfg.params:
            lines.append(f"{key} = {cfg.params[key]!r}")
    for key in SETTING_KEYS:
        if key in cfg.settings:
            value = cfg.settings[key]
            lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- argument parsing


def _add_model_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("model parameters")
    for key in PARAM_KEYS:
        g.add_argument(flag_name(key), dest=f"param:{key}", type=float, default=None, metavar="X")
    p.add_argument("--preset", default=None, help=f"base parameters ({', '.join(PRESETS)})")
    p.add_argument("--config", default=None, help="flat key = value file; flags override it")
    p.add_argument("--write-config", default=None, metavar="PATH", help="save the resolved configuration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collider-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="exact estimands for one parameter vector")
    _add_model_flags(p)
    p.add_argument("--format", dest="set:format", choices=("pretty", "csv"), default=None)
    p.add_argument("--out", dest="set:out", default=None)

    p = sub.add_parser("sweep", help="one-parameter sweep to CSV (and optionally SVG)")
    _add_model_flags(p)
    p.add_argument("--vary", dest="set:vary", default=None)
    p.add_argument("--from", dest="set:from", type=float, default=None)
    p.add_argument("--to", dest="set:to", type=float, default=None)
    p.add_argument("--steps", dest="set:steps", type=int, default=None)
    p.add_argument("--out", dest="set:out", default=None)
    p.add_argument("--svg", dest="set:svg", default=None)
    p.add_argument("--workers", dest="set:workers", type=int, default=None)

    p = sub.add_parser("mc-check", help="exact values against the Monte Carlo oracle")
    _add_model_flags(p)
    p.add_argument("--n", dest="set:n", type=int, default=None)
    p.add_argument("--seed", dest="set:seed", type=int, default=None)
    p.add_argument("--tol", dest="set:tol", type=float, default=None, help="tolerance in standard errors")
    p.add_argument("--workers", dest="set:workers", type=int, default=None)

    p = sub.add_parser("plot", help="SVG line chart of the odds ratios in a sweep CSV")
    p.add_argument("csv_path")
    p.add_argument("--svg", dest="set:svg", required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(args.command)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path) as fh:
                values = parse_config_text(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        for key, value in values.items():
            (cfg.params if key in PARAM_KEYS else cfg.settings)[key] = value
    if getattr(args, "preset", None) is not None:
        cfg.settings["preset"] = args.preset
    for dest, value in vars(args).items():
        if value is None:
            continue
        if dest.startswith("param:"):
            cfg.params[dest[6:]] = value
        elif dest.startswith("set:"):
            cfg.settings[dest[4:]] = value
    return cfg


def resolve_params(cfg: RunConfig) -> ScmParams:
    preset = cfg.setting("preset", "zero")
    if preset not in PRESETS:
        raise UsageError(f"unknown preset {preset!r}; choose one of {', '.join(PRESETS)}")
    try:
        return replace(PRESETS[preset], **cfg.params)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- output


def _num(x: Optional[float]) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    return format(x, ".17g")


def csv_record(param: str, value: Optional[float], rep: Optional[EstimandReport]) -> List[str]:
    rec = [param, _num(value)]
    for name in CSV_FIELDS[2:]:
        rec.append(_num(getattr(rep, name)) if rep is not None else "NA")
    return rec


def rows_to_csv(rows: List[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    buf.write(CSV_HEADER + "\n")
    for row in rows:
        w.writerow(csv_record(row.param, row.param_value, row.report))
    return buf.getvalue()


def read_csv(text: str) -> List[Dict[str, object]]:
    """Parse a sweep CSV back to typed values (NA becomes None)."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise UsageError("not a collider-lab CSV (header mismatch)")
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append({k: (v if k == "param" else (None if v == "NA" else float(v))) for k, v in rec.items()})
    return out


def format_pretty(rep: EstimandReport, params: ScmParams) -> str:
    lines = ["parameters:"]
    for key, value in params.as_dict().items():
        if value is not None:
            lines.append(f"  {key:<9} {value:g}")
    lines.append("")
    lines.append(f"  {'estimand':<10} {'additive':>14} {'odds ratio':>14}")
    for k in ESTIMANDS:
        orv = getattr(rep, f"or_{k}")
        lines.append(f"  {k:<10} {getattr(rep, 'delta_' + k):>14.8f} {('NA' if orv is None else f'{orv:.8f}'):>14}")
    lines.append(f"  {'total':<10} {rep.total_effect:>14.8f} {'':>14}")
    lines.append("")
    lines.append(f"  P(M=1) = {rep.p_m1:.8f}")
    lines.append(f"  P(Y=1) = {rep.p_y1:.8f}")
    return "\n".join(lines) + "\n"


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def sweep_svg(rows: List[SweepRow] | List[Dict[str, object]], title: str = "") -> str:
    if rows and isinstance(rows[0], SweepRow):
        recs = [dict(zip(CSV_FIELDS, csv_record(r.param, r.param_value, r.report))) for r in rows]
        recs = [{k: (v if k == "param" else (None if v == "NA" else float(v))) for k, v in r.items()} for r in recs]
    else:
        recs = rows
    x = [r["value"] for r in recs]
    series = {f"OR_{k}": [r[f"or_{k}"] for r in recs] for k in ESTIMANDS}
    xlabel = recs[0]["param"] if recs else ""
    return line_chart(x, series, title=title, xlabel=xlabel)


# ---------------------------------------------------------------- commands


def cmd_compute(cfg: RunConfig) -> int:
    params = resolve_params(cfg)
    rep = report(params)
    if cfg.setting("format", "pretty") == "csv":
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        csv.writer(buf, lineterminator="\n").writerow(csv_record("base", None, rep))
        text = buf.getvalue()
    else:
        text = format_pretty(rep, params)
    _emit(text, cfg.setting("out"))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    vary = cfg.setting("vary")
    if vary is None:
        raise UsageError("sweep needs --vary")
    preset = cfg.setting("preset")
    try:
        if preset is not None and preset not in ("zero",):
            spec = preset_spec(preset, vary, cfg.setting("steps", DEFAULT_STEPS))
            if cfg.params:
                spec = replace(spec, base=replace(spec.base, **cfg.params))
        else:
            spec = SweepSpec(resolve_params(cfg), vary, steps=cfg.setting("steps", DEFAULT_STEPS))
        if "from" in cfg.settings or "to" in cfg.settings:
            spec = replace(spec, start=cfg.setting("from", spec.start), stop=cfg.setting("to", spec.stop))
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from None
    rows = run_sweep(spec, workers=cfg.setting("workers", 1))
    _emit(rows_to_csv(rows), cfg.setting("out"))
    if cfg.setting("svg"):
        title = f"{preset or 'custom'}: odds ratios vs {vary}"
        with open(cfg.setting("svg"), "w") as fh:
            fh.write(sweep_svg(rows, title))
    return EXIT_OK


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def cmd_mc_check(cfg: RunConfig) -> int:
    params = resolve_params(cfg)
    n = cfg.setting("n", 1_000_000)
    if n < mc.MIN_N:
        raise UsageError(f"--n must be at least {mc.MIN_N}")
    seed = cfg.setting("seed")
    if seed is None:
        seed = default_seed()
    tol = cfg.setting("tol", 4.0)
    exact = report(params)
    est = mc.estimate_report(params, n, seed, workers=cfg.setting("workers", 1))
    rows = mc.compare(exact, est, tol_se=tol)
    print(f"n = {n}, seed = {seed}, tolerance = {tol:g} SE (odds ratios on the log scale)")
    print(f"  {'quantity':<16} {'exact':>12} {'monte carlo':>12} {'se':>10} {'|z|':>7}  ok")
    for key, row in rows.items():
        print(
            f"  {key:<16} {row['exact']:>12.6f} {row['mc']:>12.6f} {row['se']:>10.2e} {row['z']:>7.2f}  "
            f"{'yes' if row['ok'] else 'NO'}"
        )
    return EXIT_OK if all(r["ok"] for r in rows.values()) else EXIT_TOLERANCE


def cmd_plot(cfg: RunConfig, csv_path: str) -> int:
    try:
        with open(csv_path) as fh:
            recs = read_csv(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {csv_path}: {exc}") from None
    with open(cfg.setting("svg"), "w") as fh:
        fh.write(sweep_svg(recs, title=os.path.basename(csv_path)))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if getattr(args, "write_config", None):
            with open(args.write_config, "w") as fh:
                fh.write(format_config(cfg))
        if cfg.command == "compute":
            return cmd_compute(cfg)
        if cfg.command == "sweep":
            return cmd_sweep(cfg)
        if cfg.command == "mc-check":
            return cmd_mc_check(cfg)
        return cmd_plot(cfg, args.csv_path)
    except UsageError as exc:
        print(f"collider-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateModelError as exc:
        print(f"collider-lab: degenerate model: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
