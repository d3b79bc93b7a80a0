"""Cross-checks between the series solution, the simulator and known bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import simulator
from .solver import (CoeffTables, ModelParamsExact, build_tables, queue_pmf,
                     support_size)

NORMALIZATION_TOL = 1e-9
# rho at or above which the (1 - rho)^-k growth of the coefficients is flagged
HEAVY_TRAFFIC_RHO = 0.8


def _as_dict(pmf) -> dict:
    if isinstance(pmf, dict):
        return {int(k): float(v) for k, v in pmf.items()}
    return {i: float(v) for i, v in enumerate(pmf)}


@dataclass
class ComparisonReport:
    per_state_abs_diff: dict
    total_variation: float
    truncation_order: int | None = None
    mc_steps: int | None = None
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    empirical: dict = field(default_factory=dict)
    theoretical: list = field(default_factory=list)

    def to_json(self) -> dict:
        per_state = []
        for n, diff in sorted(self.per_state_abs_diff.items()):
            row = {"n": n, "abs_diff": diff}
            if self.empirical:
                row["empirical"] = self.empirical.get(n, 0.0)
            if self.theoretical:
                row["theoretical"] = self.theoretical[n] if n < len(self.theoretical) else "0"
            per_state.append(row)
        return {
            "params": self.params,
            "N": self.truncation_order,
            "steps": self.mc_steps,
            "seed": self.params.get("seed"),
            "tv": self.total_variation,
            "per_state": per_state,
            "notes": list(self.notes),
        }


def compare_pmf(emp, theo, *, allow_signed: bool = False) -> ComparisonReport:
    """Half L1 distance between two pmfs given as dicts or sequences indexed by n.

    With ``allow_signed`` the second argument may carry negative entries (a
    truncated series outside its convergence disc); it must still sum to one.
    """
    emp, theo = _as_dict(emp), _as_dict(theo)
    for name, pmf, signed in (("empirical", emp, False), ("theoretical", theo, allow_signed)):
        total = math.fsum(pmf.values())
        if abs(total - 1) > NORMALIZATION_TOL * max(1.0, sum(abs(v) for v in pmf.values())):
            raise ValueError(f"{name} pmf sums to {total}, not 1")
        if not signed and any(v < -NORMALIZATION_TOL for v in pmf.values()):
            raise ValueError(f"{name} pmf has negative entries")
    support = sorted(set(emp) | set(theo))
    diffs = {n: abs(emp.get(n, 0.0) - theo.get(n, 0.0)) for n in support}
    tv = 0.5 * math.fsum(diffs.values())
    return ComparisonReport(diffs, tv)


def radius_bound(rho: float) -> tuple:
    """(C, phi) with C = max(e^2, 2 / (1 - rho)) and phi = 1 / C."""
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    C = max(math.e ** 2, 2.0 / (1.0 - rho))
    return C, 1.0 / C


def default_grid(points: int = 64) -> np.ndarray:
    return np.linspace(-1.0, 1.0, points)


@dataclass
class BoundCheck:
    C: float
    max_ratio: dict            # k -> max |a_l^k(z)| / C^k
    max_derivative_ratio: dict  # k -> max |d/dz a_l^k(z)| / C^k
    violations: int
    derivative_violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def coefficient_bound_check(tables: CoeffTables, grid=None) -> BoundCheck:
    """Compare |a_l^k| and |d/dz a_l^k| on a real grid in [-1, 1] against C^k."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.abs(grid) > 1):
        raise ValueError("grid points must satisfy |z| <= 1")
    C, _ = radius_bound(float(tables.rho))
    ratios, dratios = {}, {}
    bad = dbad = 0
    for k, row in enumerate(tables.a):
        bound = C ** k
        worst = dworst = 0.0
        for poly in row:
            coeffs = [float(c) for c in poly.coeffs]
            dcoeffs = [float(c) for c in poly.derivative().coeffs]
            vals = np.abs(np.polynomial.polynomial.polyval(grid, coeffs)) if coeffs else np.zeros_like(grid)
            dvals = np.abs(np.polynomial.polynomial.polyval(grid, dcoeffs)) if dcoeffs else np.zeros_like(grid)
            bad += int(np.sum(vals > bound))
            dbad += int(np.sum(dvals > bound))
            worst = max(worst, float(vals.max()) / bound)
            dworst = max(dworst, float(dvals.max()) / bound)
        ratios[k] = worst
        dratios[k] = dworst
    return BoundCheck(C, ratios, dratios, bad, dbad)


def end_to_end_compare(params_exact: ModelParamsExact, params_float: simulator.ModelParamsFloat,
                       N: int, steps: int, seed: int,
                       burn_in: int = simulator.DEFAULT_BURN_IN) -> ComparisonReport:
    """Simulate, solve, and compare the queue-length marginals."""
    if abs(float(params_exact.rho) - params_float.rho) > 1e-12 or \
            abs(float(params_exact.q) - params_float.q) > 1e-12:
        raise ValueError("exact and float parameters disagree")
    tables = build_tables(params_exact, N)
    theo = queue_pmf(tables, params_exact.q, support_size(tables))
    dist = simulator.run(params_float, steps, burn_in, seed)
    emp = simulator.marginal_n(dist)

    signed = any(v < 0 for v in theo)
    report = compare_pmf(emp, [float(v) for v in theo], allow_signed=True)
    report.truncation_order = N
    report.mc_steps = steps
    C, phi = radius_bound(params_float.rho)
    report.params = {
        "rho": str(params_exact.rho), "q": str(params_exact.q),
        "seed": seed, "burn_in": burn_in, "rng": simulator.RNG_NAME,
        "C": C, "phi": phi, "q_over_phi": params_float.q / phi,
    }
    if params_float.q >= phi:
        report.notes.append("outside certified radius: q >= phi, series convergence not guaranteed")
    if params_float.rho >= HEAVY_TRAFFIC_RHO:
        report.notes.append("heavy traffic: coefficients grow like (1 - rho)^-k, slow convergence expected")
    if signed:
        report.notes.append("truncated series has negative entries; distance is not a total variation of pmfs")
    report.theoretical = [str(v) for v in theo]
    report.empirical = emp
    return report
