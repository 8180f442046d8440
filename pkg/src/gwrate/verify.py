"""Self-check suites run by ``gwrate verify``.

Each suite returns a :class:`SuiteResult`; the suites exercise the closed
forms against numerical routes for one vector of canonical correlations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import apply_transformation, canonical_decomposition
from .information import lower_bound_given_qw, minimize_lower_bound, wyner_ci_closed_form, wyner_common_information
from .model import canonical_pair
from .rate_region import PLANE_TOL, check_pangloss_and_marginal_bounds, gray_wyner_triple
from .realization import (
    assemble_joint_covariance,
    conditional_independence_gap,
    identity_qw,
    random_feasible_qw,
    validate_qw,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def random_nonsingular(rng, p, max_cond=1e3):
    while True:
        m = rng.standard_normal((p, p))
        if np.linalg.cond(m) < max_cond:
            return m


def invariance_suite(d, trials=20, seed=0):
    rng = np.random.default_rng(seed)
    pair = canonical_pair(d)
    ref = canonical_decomposition(pair)
    worst_d = worst_c = 0.0
    partition_ok = True
    for _ in range(trials):
        t = apply_transformation(pair, random_nonsingular(rng, pair.p1), random_nonsingular(rng, pair.p2))
        dec = canonical_decomposition(t)
        partition_ok &= (dec.p11, dec.n, dec.p13, dec.p23) == (ref.p11, ref.n, ref.p13, ref.p23)
        if dec.n == ref.n:
            worst_d = max(worst_d, float(np.max(np.abs(dec.d - ref.d), initial=0.0)))
        worst_c = max(worst_c, abs(wyner_common_information(dec).value - wyner_common_information(ref).value))
    ok = partition_ok and worst_d <= 1e-8 and worst_c <= 1e-8
    return SuiteResult("basis invariance", ok, f"{trials} trials, max |dd|={worst_d:.2e}, max |dC_W|={worst_c:.2e}")


def lower_bound_suite(d, seed=0, n_points=1000):
    closed = wyner_ci_closed_form(d)
    at_identity = lower_bound_given_qw(d, np.eye(len(d)))
    full = minimize_lower_bound(d, "full", seed=seed, n_points=n_points)
    diag = minimize_lower_bound(d, "diagonal")
    ok = (
        abs(at_identity - closed) <= 1e-12
        and full.below_closed_form == 0
        and full.value >= closed - 1e-8
        and np.allclose(diag.qw.q, 1.0, atol=1e-8, rtol=0)
    )
    return SuiteResult(
        "lower bound / common information",
        ok,
        f"C_W={closed:.10g}, bound(I)-C_W={at_identity - closed:.1e}, full-search min-C_W={full.value - closed:.2e}",
    )


def ci_suite(d, trials=100, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    marg_ok = True
    n = len(d)
    target = np.block([[np.eye(n), np.diag(d)], [np.diag(d), np.eye(n)]])
    for _ in range(trials):
        real = assemble_joint_covariance(d, random_feasible_qw(d, rng))
        worst = max(worst, conditional_independence_gap(real))
        marg_ok &= bool(np.array_equal(real.Q_s[: 2 * n, : 2 * n], target))
    return SuiteResult(
        "conditional independence",
        worst <= 1e-12 and marg_ok,
        f"{trials} random Q_W, max gap={worst:.2e}, marginal exact={marg_ok}",
    )


def pangloss_suite(d, grid=20):
    d = np.asarray(d, dtype=float)
    cap = float(np.sum(1 - d))
    levels = np.linspace(cap / (grid + 1), cap * grid / (grid + 1), grid)
    qw = identity_qw(d)
    worst = 0.0
    off_plane = 0
    bounds_ok = True
    for a in levels:
        for b in levels:
            pt = gray_wyner_triple(d, qw, (a, b))
            worst = max(worst, abs(pt.pangloss_gap))
            off_plane += not pt.on_pangloss_plane
            bounds_ok &= check_pangloss_and_marginal_bounds(pt, d).passed
    ok = worst <= PLANE_TOL and bounds_ok
    return SuiteResult(
        "Pangloss identity on D_W",
        ok,
        f"{grid}x{grid} grid, max |gap|={worst:.3e}, off-plane points={off_plane}, bounds ok={bounds_ok}",
    )


def run_all(d, seed=0):
    d = np.asarray(d, dtype=float)
    validate_qw(d, np.eye(d.size))
    return [
        invariance_suite(d, seed=seed),
        lower_bound_suite(d, seed=seed),
        ci_suite(d, seed=seed),
        pangloss_suite(d),
    ]
