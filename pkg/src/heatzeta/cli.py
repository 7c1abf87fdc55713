"""Command-line front end.

Subcommands: parametrix, coeffs, spectrum, zeta, heat-trace, verify, hurwitz.
JSON is written with sorted keys so identical configurations give identical
bytes.  Exit codes: 0 success, 2 configuration error, 3 non-positive operator,
4 numeric-quality failure.
"""

from __future__ import annotations

import os

# thread count must be fixed before numpy loads its BLAS
_THREADS = os.environ.get("HEATZETA_THREADS")
if _THREADS:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _THREADS)

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .fock import (DEFAULT_CUTOFF, PositivityError, SpectrumResult, compute_spectrum,
                   hurwitz_partial_sum)
from .models import BUILTIN, ModelError, ModelSpec, builtin_model
from .parametrix import DEFAULT_DEPTH, hurwitz_shift, parametrix_expand
from .symbols import as_fraction
from .verify import default_t_grid, heat_trace_compare, verify_model
from .zeta import ConvergenceError, continuation_table

EXIT_OK, EXIT_CONFIG, EXIT_POSITIVITY, EXIT_NUMERIC = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model: str = "jc"
    params: dict = field(default_factory=dict)
    depth: int = DEFAULT_DEPTH
    cutoff: int = DEFAULT_CUTOFF
    tau: Fraction | None = None
    t_grid: list | None = None
    s_grid: list | None = None
    out: str | None = None
    report: str | None = None
    csv: str | None = None
    markdown: str | None = None

    def to_json(self) -> dict:
        return {"model": self.model,
                "params": {k: _frac(v) for k, v in sorted(self.params.items())},
                "depth": self.depth, "cutoff": self.cutoff,
                "tau": None if self.tau is None else _frac(self.tau),
                "t_grid": self.t_grid, "s_grid": self.s_grid}


def _frac(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def parse_rational(text: str) -> Fraction:
    """Exact ``p/q`` or integer; floats are rejected."""
    try:
        return as_fraction(text.strip())
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid rational {text!r}: use an integer or p/q") from exc


def parse_grid(text: str) -> list:
    """``a,b,c`` or ``geom:start:stop:count`` or ``lin:start:stop:count``."""
    try:
        if text.startswith(("geom:", "lin:")):
            kind, a, b, k = text.split(":")
            fn = np.geomspace if kind == "geom" else np.linspace
            return [float(x) for x in fn(float(a), float(b), int(k))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"invalid grid {text!r}") from exc


def load_model(cfg: RunConfig) -> ModelSpec:
    path = Path(cfg.model)
    if cfg.model not in BUILTIN and (path.suffix == ".json" or path.exists()):
        if cfg.params:
            raise ConfigError("parameters cannot be combined with a model file")
        try:
            return ModelSpec.from_json(json.loads(path.read_text()))
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read model {cfg.model}: {exc}") from exc
    try:
        return builtin_model(cfg.model, **cfg.params)
    except TypeError as exc:
        raise ConfigError(f"bad parameter for {cfg.model}: {exc}") from exc


def dump_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _require_positive(spec: SpectrumResult):
    if not spec.positive:
        raise PositivityError(
            f"operator is not positive (lambda_min = {spec.eigenvalues[0]:.6g}); "
            f"rerun with --tau greater than {-spec.eigenvalues[0]:.6g}")


# -- subcommands ------------------------------------------------------------------

def cmd_parametrix(cfg: RunConfig, model: ModelSpec) -> int:
    bs = parametrix_expand(model, cfg.depth)
    if cfg.tau:
        bs = hurwitz_shift(model, bs, cfg.tau)
    data = {"config": cfg.to_json(), "model": model.to_json(),
            "terms": [{"j": j, "symbol": b.to_json()} for j, b in enumerate(bs)]}
    _emit(dump_json(data), cfg.out)
    return EXIT_OK


def _table(cfg: RunConfig, model: ModelSpec):
    # one extra term so both parities are present through j = depth // 2
    bs = parametrix_expand(model, 2 * (cfg.depth // 2) + 1)
    if cfg.tau:
        bs = hurwitz_shift(model, bs, cfg.tau)
    return bs, continuation_table(model, bs, cfg.depth // 2, tau=cfg.tau or 0)


def cmd_coeffs(cfg: RunConfig, model: ModelSpec) -> int:
    _, table = _table(cfg, model)
    data = {"config": cfg.to_json(), "model": model.to_json(), "table": table.to_json(),
            "note": "symbolic coefficients; positivity of the operator is not checked here"}
    _emit(dump_json(data), cfg.out)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, model: ModelSpec) -> int:
    spec = compute_spectrum(model, cfg.cutoff)
    if cfg.tau:
        spec = spec.shifted(cfg.tau)
    _emit(dump_json({"config": cfg.to_json(), "spectrum": spec.to_json()}), cfg.out)
    if cfg.csv:
        rows = [(k, float(v), k < spec.converged_count) for k, v in enumerate(spec.eigenvalues)]
        Path(cfg.csv).write_text(_csv_text(["index", "eigenvalue", "converged"], rows))
    return EXIT_OK


def cmd_zeta(cfg: RunConfig, model: ModelSpec) -> int:
    spec = compute_spectrum(model, cfg.cutoff)
    tau = float(cfg.tau or 0)
    _require_positive(spec.shifted(tau))
    grid = cfg.s_grid or [1.5, 2.0, 3.0, 4.0]
    rows = []
    for s in grid:
        try:
            v, tail = hurwitz_partial_sum(spec, tau, s, model.n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        rows.append((s, v, tail))
    _emit(_csv_text(["s", "zeta", "tail_bound"], rows), cfg.csv or cfg.out)
    return EXIT_OK


def cmd_heat_trace(cfg: RunConfig, model: ModelSpec) -> int:
    bs, table = _table(cfg, model)
    spec = compute_spectrum(model, cfg.cutoff)
    if cfg.tau:
        spec = spec.shifted(cfg.tau)
    grid = cfg.t_grid or [float(x) for x in default_t_grid()]
    cmp_ = heat_trace_compare(spec, table=table, t_grid=grid)
    rows = [(r["t"], r["heat_trace"], r["tail_bound"], r["singular_part"], r["delta"])
            for r in cmp_.rows()]
    _emit(_csv_text(["t", "heat_trace", "tail_bound", "singular_part", "delta"], rows),
          cfg.csv or cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, model: ModelSpec) -> int:
    grid = np.asarray(cfg.t_grid) if cfg.t_grid else None
    report, table, spec = verify_model(model, cfg.cutoff, cfg.depth, cfg.tau, grid)
    data = {"config": cfg.to_json(), "report": report.to_json(), "table": table.to_json()}
    text = dump_json(data)
    _emit(text, cfg.report or cfg.out)
    if cfg.markdown:
        Path(cfg.markdown).write_text(report.to_markdown())
    if cfg.report or cfg.out:
        sys.stdout.write(report.to_markdown())
    return EXIT_OK if report.passed else EXIT_NUMERIC


def cmd_hurwitz(cfg: RunConfig, model: ModelSpec) -> int:
    if cfg.tau is None:
        raise ConfigError("hurwitz requires --tau")
    if cfg.tau < 0:
        raise ConfigError("tau must be non-negative")
    _, table = _table(cfg, model)
    spec = compute_spectrum(model, cfg.cutoff)
    _require_positive(spec.shifted(float(cfg.tau)))
    sums = []
    for s in cfg.s_grid or [2.0, 3.0]:
        v, tail = hurwitz_partial_sum(spec, float(cfg.tau), s, model.n)
        sums.append({"s": s, "value": v, "tail_bound": tail})
    data = {"config": cfg.to_json(), "model": model.to_json(), "table": table.to_json(),
            "sums": sums}
    _emit(dump_json(data), cfg.out)
    return EXIT_OK


COMMANDS = {
    "parametrix": cmd_parametrix,
    "coeffs": cmd_coeffs,
    "spectrum": cmd_spectrum,
    "zeta": cmd_zeta,
    "heat-trace": cmd_heat_trace,
    "verify": cmd_verify,
    "hurwitz": cmd_hurwitz,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatzeta",
                                     description="Heat parametrix and spectral zeta coefficients")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--model", default="jc", help="ho, jc, jc3 or a ModelSpec JSON path")
        p.add_argument("--alpha")
        p.add_argument("--beta")
        p.add_argument("--gamma")
        p.add_argument("--param", action="append", default=[], metavar="NAME=P/Q",
                       help="further model parameter, e.g. beta1=1/2")
        p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
        p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
        p.add_argument("--tau", help="Hurwitz shift (rational)")
        p.add_argument("--t-grid", help="a,b,c or geom:start:stop:count")
        p.add_argument("--s-grid", help="a,b,c or lin:start:stop:count")
        p.add_argument("--out")
        p.add_argument("--report")
        p.add_argument("--csv")
        p.add_argument("--markdown")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {}
    for key in ("alpha", "beta", "gamma"):
        v = getattr(ns, key)
        if v is not None:
            params[key] = parse_rational(v)
    for item in ns.param:
        if "=" not in item:
            raise ConfigError(f"--param expects NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = parse_rational(v)
    if ns.depth < 0:
        raise ConfigError("depth must be non-negative")
    if ns.cutoff < 1:
        raise ConfigError("cutoff must be positive")
    return RunConfig(
        model=ns.model, params=params, depth=ns.depth, cutoff=ns.cutoff,
        tau=None if ns.tau is None else parse_rational(ns.tau),
        t_grid=parse_grid(ns.t_grid) if ns.t_grid else None,
        s_grid=parse_grid(ns.s_grid) if ns.s_grid else None,
        out=ns.out, report=ns.report, csv=ns.csv, markdown=ns.markdown)


def run(command: str, cfg: RunConfig) -> int:
    model = load_model(cfg)
    return COMMANDS[command](cfg, model)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return run(ns.command, cfg)
    except (ConfigError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PositivityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POSITIVITY
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
