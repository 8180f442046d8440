"""Command-line front end.

Every subcommand reads a ``{"p1", "p2", "Q"}`` covariance file and writes
JSON or CSV to ``--output`` (standard output by default).  Errors map to
exit codes 2 (input), 3 (infeasible) and 4 (numerical).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .canonical import canonical_decomposition, verify_canonical_form
from .errors import GWError, IdenticalPartPresent, InputError
from .information import minimize_lower_bound, mutual_information, wyner_common_information
from .model import DEFAULT_TOL, NumericTolerances, canonical_pair, load_pair
from .rate_region import gray_wyner_triple, weighted_functional
from .realization import assemble_joint_covariance, empirical_covariance, sample, validate_qw
from .verify import run_all

SUBCOMMANDS = ("canonical", "mutual-info", "common-info", "realize", "sample", "rate-point", "sweep", "verify")
VERIFY_FIXTURES = ((0.5,), (0.9, 0.3))
SWEEP_COLUMNS = (
    "delta1", "delta2", "alpha1", "alpha2", "R0", "R1", "R2",
    "sum_rate", "joint_rdf", "pangloss_gap", "in_DW", "on_plane",
)
RATE_KEYS = ("R0", "R1", "R2", "sum_rate", "joint_rdf", "pangloss_gap", "value", "C_W", "mutual_information")


@dataclass
class RunConfig:
    subcommand: str
    input: str | None = None
    tolerances: NumericTolerances = field(default_factory=NumericTolerances)
    delta1: str | None = None
    delta2: str | None = None
    alpha1: str | None = None
    alpha2: str | None = None
    qw: str = "identity"
    samples: int = 1000
    seed: int = 0
    output: str | None = None
    format: str = "json"
    unit: str = "nats"

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise InputError(f"unknown subcommand {self.subcommand!r}")
        if self.subcommand != "verify" and not self.input:
            raise InputError(f"{self.subcommand} needs --input")
        if self.subcommand in ("rate-point", "sweep") and (self.delta1 is None or self.delta2 is None):
            raise InputError(f"{self.subcommand} needs --delta1 and --delta2")
        if (self.alpha1 is None) != (self.alpha2 is None):
            raise InputError("give both --alpha1 and --alpha2 or neither")
        if self.format not in ("json", "csv"):
            raise InputError(f"unknown format {self.format!r}")
        if self.unit not in ("nats", "bits"):
            raise InputError(f"unknown unit {self.unit!r}")

    @property
    def scale(self):
        return 1 / math.log(2) if self.unit == "bits" else 1.0


def parse_grid(text):
    """``"start:stop:count"`` (inclusive) or a single number."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise ValueError("count must be positive")
            return np.linspace(float(parts[0]), float(parts[1]), count).tolist()
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}: {exc}") from exc
    raise InputError(f"bad grid {text!r}: expected start:stop:count")


def parse_scalar(text, name):
    grid = parse_grid(text)
    if len(grid) != 1:
        raise InputError(f"--{name} must be a single number for this subcommand")
    return grid[0]


def load_qw(source, d):
    if source in (None, "identity"):
        return validate_qw(d, np.eye(d.size))
    try:
        data = json.loads(Path(source).read_text())
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot parse Q_W file {source}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("Qw", data.get("Q_W"))
    try:
        matrix = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"Q_W file {source} does not hold a matrix") from exc
    return validate_qw(d, matrix)


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2) + "\n"


def _scaled(obj, scale):
    if scale == 1.0:
        return obj
    return {k: (v * scale if k in RATE_KEYS and isinstance(v, float) else v) for k, v in obj.items()}


def _decompose(config):
    pair = load_pair(config.input, config.tolerances)
    return pair, canonical_decomposition(pair, config.tolerances)


def _correlated_d(decomp):
    if decomp.p11 > 0:
        raise IdenticalPartPresent(f"identical part present (p11={decomp.p11})")
    return np.asarray(decomp.d, dtype=float)


def _key_value(obj):
    rows = [(k, v) for k, v in obj.items() if not isinstance(v, (list, str))]
    return _csv_text(("quantity", "value"), rows)


def cmd_canonical(config):
    pair, decomp = _decompose(config)
    out = decomp.to_json()
    out["verification"] = verify_canonical_form(decomp, pair).to_json()
    if config.format == "csv":
        raise InputError("canonical output is JSON only")
    return _json_text(out), 0


def cmd_mutual_info(config):
    _, decomp = _decompose(config)
    out = _scaled({"mutual_information": mutual_information(decomp), "unit": config.unit}, config.scale)
    return (_key_value(out) if config.format == "csv" else _json_text(out)), 0


def cmd_common_info(config):
    _, decomp = _decompose(config)
    ci = wyner_common_information(decomp)
    out = {"C_W": ci.value, "unit": config.unit, "Qw": ci.Q_W.tolist()}
    if ci.note:
        out["note"] = ci.note
    elif decomp.n:
        full = minimize_lower_bound(decomp.d, "full", opt_tol=config.tolerances.opt_tol, seed=config.seed)
        out["falsification"] = {
            "points": full.evaluated,
            "below_closed_form": full.below_closed_form,
            "best_value": full.value * config.scale,
            "best_minus_C_W": (full.value - ci.value) * config.scale,
        }
    out = _scaled(out, config.scale)
    return (_key_value(out) if config.format == "csv" else _json_text(out)), 0


def cmd_realize(config):
    _, decomp = _decompose(config)
    d = _correlated_d(decomp)
    real = assemble_joint_covariance(d, load_qw(config.qw, d))
    if config.format == "csv":
        raise InputError("realize output is JSON only")
    out = real.to_json()
    out["degenerate"] = real.degenerate
    return _json_text(out), 0


def cmd_sample(config):
    _, decomp = _decompose(config)
    d = _correlated_d(decomp)
    real = assemble_joint_covariance(d, load_qw(config.qw, d))
    rows = sample(real, config.samples, config.seed)
    dev = np.abs(empirical_covariance(rows) - real.Q_s) if len(rows) else np.zeros_like(real.Q_s)
    report = {"samples": int(config.samples), "seed": config.seed, "max_abs_deviation": float(dev.max(initial=0.0))}
    n = d.size
    header = [f"x12_{i + 1}" for i in range(n)] + [f"x22_{i + 1}" for i in range(n)] + [f"w_{i + 1}" for i in range(n)]
    report_text = _json_text(report)
    if config.output:
        Path(config.output).with_suffix(".report.json").write_text(report_text)
    else:
        sys.stderr.write(report_text)
    return _csv_text(header, rows.tolist()), 0


def _sweep_row(point, alpha1, alpha2, scale):
    return [
        point.distortion.delta1, point.distortion.delta2, alpha1, alpha2,
        point.R0 * scale, point.R1 * scale, point.R2 * scale, point.sum_rate * scale,
        point.joint_rdf * scale, point.pangloss_gap * scale, point.in_D_W, point.on_pangloss_plane,
    ]


def cmd_rate_point(config):
    _, decomp = _decompose(config)
    d = _correlated_d(decomp)
    dist = (parse_scalar(config.delta1, "delta1"), parse_scalar(config.delta2, "delta2"))
    point = gray_wyner_triple(decomp, load_qw(config.qw, d), dist)
    if config.format == "csv":
        return _csv_text(SWEEP_COLUMNS, [_sweep_row(point, None, None, config.scale)]), 0
    out = _scaled(point.to_json(), config.scale)
    out["unit"] = config.unit
    return _json_text(out), 0


def cmd_sweep(config):
    _, decomp = _decompose(config)
    d = _correlated_d(decomp)
    fixed_qw = load_qw(config.qw, d)
    weights = [(None, None)]
    if config.alpha1 is not None:
        weights = [(a1, a2) for a1 in parse_grid(config.alpha1) for a2 in parse_grid(config.alpha2)]
    rows = []
    for d1 in parse_grid(config.delta1):
        for d2 in parse_grid(config.delta2):
            for a1, a2 in weights:
                qw = fixed_qw
                if a1 is not None:
                    qw = weighted_functional(decomp, (d1, d2), a1, a2, opt_tol=config.tolerances.opt_tol).qw
                point = gray_wyner_triple(decomp, qw, (d1, d2))
                rows.append(_sweep_row(point, a1, a2, config.scale))
    if config.format == "csv":
        return _csv_text(SWEEP_COLUMNS, rows), 0
    return _json_text([dict(zip(SWEEP_COLUMNS, r)) for r in rows]), 0


def cmd_verify(config):
    if config.input:
        _, decomp = _decompose(config)
        targets = [_correlated_d(decomp)]
    else:
        targets = [np.array(d) for d in VERIFY_FIXTURES]
    lines, ok = [], True
    for d in targets:
        canonical_pair(d)
        for res in run_all(d, seed=config.seed):
            ok &= res.passed
            lines.append({"d": d.tolist(), "suite": res.name, "passed": res.passed, "detail": res.detail})
    if config.format == "csv":
        text = _csv_text(("d", "suite", "passed", "detail"), [(" ".join(map(_fmt, r["d"])), r["suite"], r["passed"], r["detail"]) for r in lines])
    else:
        text = _json_text({"passed": ok, "suites": lines})
    return text, 0 if ok else 1


HANDLERS = {
    "canonical": cmd_canonical,
    "mutual-info": cmd_mutual_info,
    "common-info": cmd_common_info,
    "realize": cmd_realize,
    "sample": cmd_sample,
    "rate-point": cmd_rate_point,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def run(config):
    """Execute one subcommand; returns the exit status."""
    text, status = HANDLERS[config.subcommand](config)
    if config.output:
        Path(config.output).write_text(text)
    else:
        sys.stdout.write(text)
    return status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--input")
    common.add_argument("--delta1")
    common.add_argument("--delta2")
    common.add_argument("--alpha1")
    common.add_argument("--alpha2")
    common.add_argument("--qw", default="identity", help="'identity' or a JSON file holding the matrix")
    common.add_argument("--samples", type=int, default=1000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--unit", choices=("nats", "bits"), default="nats")
    for name in ("sym", "psd", "rank", "one", "zero", "opt"):
        common.add_argument(f"--tol-{name}", type=float, default=getattr(DEFAULT_TOL, f"{name}_tol"))
    parser = _Parser(prog="gwrate", description="Gaussian common information and Gray-Wyner rate points.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        tol = NumericTolerances(**{f"{k}_tol": getattr(ns, f"tol_{k}") for k in ("sym", "psd", "rank", "one", "zero", "opt")})
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return RunConfig(
        subcommand=ns.subcommand, input=ns.input, tolerances=tol,
        delta1=ns.delta1, delta2=ns.delta2, alpha1=ns.alpha1, alpha2=ns.alpha2,
        qw=ns.qw, samples=ns.samples, seed=ns.seed, output=ns.output, format=ns.format, unit=ns.unit,
    )


def main(argv=None):
    try:
        return run(config_from_args(argv))
    except GWError as exc:
        print(f"gwrate: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
