"""Command-line front end.

    edaq solve     --rho 1/2 --q 1/10 --order 8 --n-max 6 --out results/
    edaq simulate  --rho 0.5 --q 0.1 --steps 1000000 --seed 7 --out results/
    edaq compare   --rho 0.5 --q 0.1 --steps 10000000 --out results/
    edaq tables    --rho 1/3 --order 4
    edaq marginal  --rho 1/2 --order 10

Settings may also come from a flat ``key=value`` file passed with
``--config``; flags on the command line take precedence.

Exit status: 0 success, 2 bad configuration, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import simulator, validation
from .marginals import marginal_l_series, partition_distinct, pochhammer_expand
from .solver import (DEFAULT_ORDER, ModelParamsExact, build_tables,
                     check_boundary_identities, first_orders_by_y_degree,
                     mean_queue_length, queue_pmf, sparsity_profile)

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3
MODES = ("solve", "simulate", "compare", "tables", "marginal")

DEFAULTS = {
    "rho": None,
    "q": "0",
    "order": DEFAULT_ORDER,
    "steps": 1_000_000,
    "burn_in": simulator.DEFAULT_BURN_IN,
    "seed": 0,
    "n_max": 10,
    "out": "edaq-out",
    "format": "csv",
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str
    rho: Fraction
    q: Fraction
    order: int
    steps: int
    burn_in: int
    seed: int
    n_max: int
    out: Path
    format: str

    @property
    def exact_params(self) -> ModelParamsExact:
        return ModelParamsExact(self.rho, self.q)

    @property
    def float_params(self) -> simulator.ModelParamsFloat:
        return simulator.ModelParamsFloat(float(self.rho), float(self.q))


def parse_number(text: str) -> Fraction:
    """'3/4' or '0.75' to an exact fraction (decimals are read in base 10)."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _int(key: str, value) -> int:
    try:
        return int(str(value).replace("_", ""))
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from exc


def read_config_file(path: str) -> dict:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def make_config(mode: str, flags: dict, file_values: dict | None = None) -> RunConfig:
    merged = dict(DEFAULTS)
    merged.update(file_values or {})
    merged.update({k: v for k, v in flags.items() if v is not None})

    if merged["rho"] is None:
        raise ConfigError("--rho is required")
    rho = parse_number(merged["rho"])
    q = parse_number(merged["q"])
    lower_ok = rho >= 0 if mode == "simulate" else rho > 0
    if not (lower_ok and rho < 1):
        raise ConfigError(f"rho must lie in {'[0, 1)' if mode == 'simulate' else '(0, 1)'}, got {rho}")
    if not 0 <= q < 1:
        raise ConfigError(f"q must lie in [0, 1), got {q}")

    cfg = RunConfig(
        mode=mode, rho=rho, q=q,
        order=_int("order", merged["order"]),
        steps=_int("steps", merged["steps"]),
        burn_in=_int("burn_in", merged["burn_in"]),
        seed=_int("seed", merged["seed"]),
        n_max=_int("n_max", merged["n_max"]),
        out=Path(merged["out"]),
        format=str(merged["format"]).lower(),
    )
    if cfg.order < 0:
        raise ConfigError("order must be non-negative")
    if cfg.steps <= 0:
        raise ConfigError("steps must be positive")
    if cfg.burn_in < 0:
        raise ConfigError("burn-in must be non-negative")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if cfg.n_max < 0:
        raise ConfigError("n-max must be non-negative")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    return cfg


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _float_str(x) -> str:
    return repr(float(x))


def _poly_json(coeffs) -> list:
    return [_frac_str(Fraction(c)) for c in coeffs]


def _bipoly_json(bp) -> list:
    return [_poly_json(row) for row in bp.rows]


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _table_text(header, rows, fmt: str) -> str:
    if fmt == "json":
        return _dump_json([dict(zip(header, r)) for r in rows])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _params_json(cfg: RunConfig) -> dict:
    return {"rho": _frac_str(cfg.rho), "q": _frac_str(cfg.q)}


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> list:
    tables = build_tables(cfg.exact_params, cfg.order)
    pmf = queue_pmf(tables, cfg.q, cfg.n_max)
    rows = [(n, _frac_str(p), _float_str(p)) for n, p in enumerate(pmf)]
    warnings = []
    if cfg.order == 0 and cfg.q > 0:
        warnings.append("truncation order 0: result is the q = 0 law regardless of q")
    C, phi = validation.radius_bound(float(cfg.rho))
    if float(cfg.q) >= phi:
        warnings.append(f"q outside certified radius phi = {phi!r}")
    if any(p < 0 for p in pmf):
        warnings.append("truncated series has negative entries")
    checks = check_boundary_identities(tables)
    report = {
        "params": _params_json(cfg),
        "order": cfg.order,
        "mean_queue_length": {"exact": _frac_str(mean_queue_length(tables, cfg.q)),
                              "float": float(mean_queue_length(tables, cfg.q))},
        "boundary_identities": [{"identity": c.name, "k": c.k, "passed": c.passed} for c in checks],
        "sparsity_profile": [{"k": k, "deg_y": m} for k, m in sparsity_profile(tables)],
        "first_order_by_y_degree": {str(m): k for m, k in first_orders_by_y_degree(tables).items()},
        "radius": {"C": C, "phi": phi},
        "warnings": warnings,
    }
    ext = cfg.format
    return [
        _write(cfg.out / f"pmf.{ext}", _table_text(("n", "P_n_exact", "P_n_float"), rows, ext)),
        _write(cfg.out / "solve_report.json", _dump_json(report)),
    ]


def cmd_simulate(cfg: RunConfig) -> list:
    dist = simulator.run(cfg.float_params, cfg.steps, cfg.burn_in, cfg.seed)
    ext = cfg.format
    joint = [(n, l, c, _float_str(c / dist.total)) for (n, l), c in sorted(dist.counts.items())]
    mn = [(n, _float_str(p)) for n, p in simulator.marginal_n(dist).items()]
    ml = [(l, _float_str(p)) for l, p in simulator.marginal_l(dist).items()]
    meta = {
        "params": _params_json(cfg),
        "steps": cfg.steps,
        "burn_in": cfg.burn_in,
        "seed": cfg.seed,
        "rng": simulator.RNG_NAME,
        "bernoulli_cutoff": simulator.BERNOULLI_CUTOFF,
        "start_state": [0, 0],
    }
    return [
        _write(cfg.out / f"joint.{ext}", _table_text(("n", "l", "count", "probability"), joint, ext)),
        _write(cfg.out / f"marginal_n.{ext}", _table_text(("n", "probability"), mn, ext)),
        _write(cfg.out / f"marginal_l.{ext}", _table_text(("l", "probability"), ml, ext)),
        _write(cfg.out / "simulate_report.json", _dump_json(meta)),
    ]


def cmd_compare(cfg: RunConfig) -> list:
    report = validation.end_to_end_compare(cfg.exact_params, cfg.float_params, cfg.order,
                                           cfg.steps, cfg.seed, cfg.burn_in)
    support = sorted(set(report.empirical) | set(range(len(report.theoretical))))
    theo = {n: float(Fraction(v)) for n, v in enumerate(report.theoretical)}
    rows = [(n, _float_str(report.empirical.get(n, 0.0)), _float_str(theo.get(n, 0.0)))
            for n in support]
    ext = cfg.format
    return [
        _write(cfg.out / "compare_report.json", _dump_json(report.to_json())),
        _write(cfg.out / f"compare_series.{ext}", _table_text(("n", "empirical", "theoretical"), rows, ext)),
    ]


def cmd_tables(cfg: RunConfig) -> list:
    tables = build_tables(cfg.exact_params, cfg.order)
    doc = {
        "params": {"rho": _frac_str(cfg.rho)},
        "order": cfg.order,
        "layout": "P[k] rows are z-powers holding y-coefficients; A[k][j], a[k][j] list z-coefficients",
        "P": [_bipoly_json(p) for p in tables.P],
        "A": [[_poly_json(p.coeffs) for p in row] for row in tables.A],
        "a": [[_poly_json(p.coeffs) for p in row] for row in tables.a],
    }
    return [_write(cfg.out / "tables.json", _dump_json(doc))]


def cmd_marginal(cfg: RunConfig) -> list:
    N = cfg.order
    part = marginal_l_series(cfg.rho, N)
    prod = pochhammer_expand(cfg.rho, N)
    solved = [p.at_z(1) for p in build_tables(cfg.exact_params, N).P]
    rows = []
    for k in range(N + 1):
        rows.append({
            "k": k,
            "coefficients_in_y": _poly_json(prod[k].coeffs),
            "distinct_partitions": [partition_distinct(k, j) for j in range(k + 1)],
            "product_equals_partitions": prod[k] == part[k],
            "product_equals_solver": prod[k] == solved[k],
        })
    doc = {"params": {"rho": _frac_str(cfg.rho)}, "order": N, "orders": rows,
           "all_agree": all(r["product_equals_partitions"] and r["product_equals_solver"] for r in rows)}
    return [_write(cfg.out / "marginal.json", _dump_json(doc))]


COMMANDS = {
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "tables": cmd_tables,
    "marginal": cmd_marginal,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--rho", help="thinning retention probability (traffic load), e.g. 1/2 or 0.5")
    common.add_argument("--q", help="probability that a late customer stays late for one more slot")
    common.add_argument("--order", help=f"series truncation order N (default {DEFAULT_ORDER})")
    common.add_argument("--steps", help="recorded simulation steps (default 1000000)")
    common.add_argument("--burn-in", dest="burn_in", help="discarded initial steps (default 10000)")
    common.add_argument("--seed", help="PCG64 seed (default 0)")
    common.add_argument("--n-max", dest="n_max", help="largest queue length reported by solve (default 10)")
    common.add_argument("--out", help="output directory (default edaq-out)")
    common.add_argument("--format", choices=("csv", "json"), help="format of tabular outputs")

    parser = argparse.ArgumentParser(
        prog="edaq", description="Queue with exponentially delayed arrivals: series solver and simulator.")
    sub = parser.add_subparsers(dest="mode", required=True)
    helps = {
        "solve": "queue-length pmf from the truncated q-series",
        "simulate": "Monte Carlo run of the (n, l) chain",
        "compare": "simulation vs series, total variation report",
        "tables": "dump the coefficient tables as JSON",
        "marginal": "late-customer marginal: product vs partitions vs solver",
    }
    for mode in MODES:
        sub.add_parser(mode, parents=[common], help=helps[mode])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    flags = {k: v for k, v in vars(args).items() if k not in ("mode", "config")}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = make_config(args.mode, flags, file_values)
    except ConfigError as exc:
        print(f"edaq: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        paths = COMMANDS[cfg.mode](cfg)
    except OSError as exc:
        print(f"edaq: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
