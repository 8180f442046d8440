"""Gray-Wyner rate triples for a canonical Gaussian pair under MSE distortion.

Distortions are totals over the correlated canonical block (optionally
together with the private components).  Rates are in nats.

Conditional rate-distortion functions use reverse water-filling on the
conditional variances given ``W``: ``1 - d_j/q_j`` for the first source and
``1 - d_j q_j`` for the second (the diagonals of ``cov Z1`` and ``cov Z2``).
The joint rate-distortion function is computed independently of the triple,
from the exact two-dimensional Gaussian RDF of each canonical pair and a
convex allocation of the distortion budgets across pairs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._search import golden_section
from .errors import IdenticalPartPresent, InfeasibleQw, InputError, OracleDisagreement, WeightsOutOfRange
from .information import lower_bound_given_qw
from .realization import FEAS_TOL, QwParameter, assemble_joint_covariance, validate_qw

PLANE_TOL = 1e-6
BOUND_TOL = 1e-8
REGION_TOL = 1e-12
GRID_DISAGREE_TOL = 1e-4
WF_TOL = 1e-12
WF_MAX_ITER = 200


@dataclass(frozen=True)
class DistortionPair:
    delta1: float
    delta2: float

    def __post_init__(self):
        for v in (self.delta1, self.delta2):
            if not v >= 0:
                raise InputError(f"distortions must be nonnegative, got ({self.delta1}, {self.delta2})")

    @classmethod
    def of(cls, value):
        if isinstance(value, cls):
            return value
        a, b = value
        return cls(float(a), float(b))


def _d_of(decomp):
    if hasattr(decomp, "p11"):
        if decomp.p11 > 0:
            raise IdenticalPartPresent(f"identical part present (p11={decomp.p11})")
        return np.asarray(decomp.d, dtype=float), decomp.p13, decomp.p23
    return np.atleast_1d(np.asarray(decomp, dtype=float)), 0, 0


# -- water-filling -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WaterFillingAllocation:
    levels: np.ndarray
    allocation: np.ndarray
    water_level: float

    @property
    def total(self):
        return float(self.allocation.sum())


def water_filling(levels, delta, opt_tol=WF_TOL):
    """Split ``delta`` as ``min(lambda, level_j)`` by bisection on ``lambda``."""
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    if np.any(levels < 0):
        raise InputError("water-filling levels must be nonnegative")
    if delta < 0:
        raise InputError("distortion must be nonnegative")
    if levels.size == 0:
        return WaterFillingAllocation(levels, levels.copy(), 0.0)
    top = float(levels.max())
    if delta >= levels.sum():
        return WaterFillingAllocation(levels, levels.copy(), top)
    lo, hi = 0.0, top
    lam = 0.5 * (lo + hi)
    for _ in range(WF_MAX_ITER):
        lam = 0.5 * (lo + hi)
        s = np.minimum(lam, levels).sum()
        if abs(s - delta) <= opt_tol:
            break
        if s < delta:
            lo = lam
        else:
            hi = lam
    return WaterFillingAllocation(levels, np.minimum(lam, levels), lam)


def reverse_water_filling_rate(levels, delta, opt_tol=WF_TOL):
    """``1/2 sum ln+(level_j / Delta_j)`` for independent Gaussian components."""
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    active = levels > 0
    if delta <= 0:
        return math.inf if np.any(active) else 0.0
    alloc = water_filling(levels, delta, opt_tol).allocation
    ratio = levels[active] / alloc[active]
    return float(0.5 * np.sum(np.log(np.maximum(ratio, 1.0))))


def conditional_levels(d, q, source=1):
    """Conditional variances of the correlated components given a diagonal ``W``."""
    d = np.asarray(d, dtype=float)
    q = np.asarray(q, dtype=float)
    lv = 1 - d / q if source == 1 else 1 - d * q
    return np.maximum(lv, 0.0)


def conditional_rdf(d, q, delta, source=1, opt_tol=WF_TOL):
    """``R_{Xi|W}(delta)`` for diagonal ``Q_W = diag(q)``."""
    d = np.atleast_1d(np.asarray(d, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.shape != d.shape:
        raise InputError("q and d must have the same length")
    if np.any(q < d - FEAS_TOL) or np.any(q > 1 / d + FEAS_TOL):
        bad = int(np.argmax((q < d - FEAS_TOL) | (q > 1 / d + FEAS_TOL)))
        raise InfeasibleQw(f"q[{bad}]={q[bad]:.6g} outside [{d[bad]:.6g}, {1 / d[bad]:.6g}]")
    return reverse_water_filling_rate(conditional_levels(d, q, source), delta, opt_tol)


def marginal_rdf(dimension, delta):
    """RDF of a ``dimension``-vector of independent unit-variance Gaussians."""
    p = int(dimension)
    if p < 1:
        raise InputError("dimension must be positive")
    if delta <= 0:
        return math.inf
    if delta >= p:
        return 0.0
    return 0.5 * p * math.log(p / delta)


# -- joint RDF oracle -------------------------------------------------------


def pair_joint_rdf(d, delta1, delta2):
    """Joint RDF of a unit-variance Gaussian pair with correlation ``d``.

    Individual MSE constraints ``delta1`` and ``delta2``.  Three regimes:
    one reconstruction already serves the other source; both errors
    uncorrelated with the sources' common part (``(1-a)(1-b) >= d^2``);
    or a correlated error.
    """
    d, a, b = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (d, delta1, delta2)))
    a = np.clip(a, 0.0, 1.0)
    b = np.clip(b, 0.0, 1.0)
    d2 = d * d
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sqrt((1 - a) * (1 - b))
        only1 = b >= 1 - d2 * (1 - a)
        only2 = a >= 1 - d2 * (1 - b)
        low = s * s >= d2
        r_only1 = -0.5 * np.log(a)
        r_only2 = -0.5 * np.log(b)
        r_low = 0.5 * np.log((1 - d2) / (a * b))
        r_mid = 0.5 * np.log((1 - d2) / (a * b - (d - s) ** 2))
        out = np.where(only1, r_only1, np.where(only2, r_only2, np.where(low, r_low, r_mid)))
    out = np.where(np.isnan(out), np.inf, out)
    return np.maximum(out, 0.0) if out.ndim else float(max(out, 0.0))


def _pair_joint_rdf_grad(d, a, b):
    over_a, over_b = a >= 1, b >= 1
    a = np.minimum(a, 1.0)
    b = np.minimum(b, 1.0)
    d2 = d * d
    s = np.sqrt(np.maximum((1 - a) * (1 - b), 0.0))
    only1 = b >= 1 - d2 * (1 - a)
    only2 = a >= 1 - d2 * (1 - b)
    low = s * s >= d2
    f = a * b - (d - s) ** 2
    s_safe = np.where(s > 0, s, 1.0)
    mid_a = -0.5 * (b - (d - s) * (1 - b) / s_safe) / f
    mid_b = -0.5 * (a - (d - s) * (1 - a) / s_safe) / f
    ga = np.where(only1, -0.5 / a, np.where(only2, 0.0, np.where(low, -0.5 / a, mid_a)))
    gb = np.where(only1, 0.0, np.where(only2, -0.5 / b, np.where(low, -0.5 / b, mid_b)))
    return np.where(over_a, 0.0, ga), np.where(over_b, 0.0, gb)


@dataclass(frozen=True, eq=False)
class JointRdf:
    rate: float
    allocation1: np.ndarray
    allocation2: np.ndarray
    analytic_rate: float
    low_branch: bool
    grid_rate: float | None = None

    @property
    def confident(self):
        return self.low_branch


def _components(d, private):
    # per-component (correlation, source-1 present, source-2 present)
    p13, p23 = private
    corr = np.concatenate([d, np.zeros(p13 + p23)])
    has1 = np.concatenate([np.ones(d.size + p13, bool), np.zeros(p23, bool)])
    has2 = np.concatenate([np.ones(d.size, bool), np.zeros(p13, bool), np.ones(p23, bool)])
    return corr, has1, has2


def _alloc_grid(delta, res):
    # all two-way splits of delta for two components, each capped at 1
    a = np.linspace(0.0, delta, res + 1)
    return np.clip(a, 0, 1), np.clip(delta - a, 0, 1)


def joint_rdf_oracle(d, distortion, grid_resolution=400, private=(0, 0)):
    """Joint RDF ``R_{X1,X2}(Delta1, Delta2)`` of the canonical source.

    The source splits into independent pairs; the rate is the minimum over
    per-pair allocations of the sum of exact pair RDFs.  The low-distortion
    water-filling allocation is evaluated first (``analytic_rate``) and a
    convex solver refines it.  ``low_branch`` is false when the refinement
    improves on the water-filling allocation by more than ``PLANE_TOL``.  For
    at most two components per source a grid search over splits is a
    secondary check; the solver result may not exceed it by more than
    ``GRID_DISAGREE_TOL``.
    """
    dist = DistortionPair.of(distortion)
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if dist.delta1 <= 0 or dist.delta2 <= 0:
        raise InputError("joint RDF oracle needs strictly positive distortions")
    corr, has1, has2 = _components(d, private)
    m = corr.size
    if m == 0:
        return JointRdf(0.0, np.zeros(0), np.zeros(0), 0.0, True)

    def full(x1, x2):
        a = np.ones(m)
        b = np.ones(m)
        a[has1] = x1
        b[has2] = x2
        return a, b

    lv1 = 1 - corr[has1]
    lv2 = 1 - corr[has2]
    w1 = water_filling(lv1, dist.delta1).allocation
    w2 = water_filling(lv2, dist.delta2).allocation
    analytic = float(np.sum(pair_joint_rdf(corr, *full(w1, w2))))

    n1, n2 = int(has1.sum()), int(has2.sum())
    # rates are flat beyond unit distortion per component, so the budgets can be spent exactly
    eps = 1e-12
    bounds = [(eps, dist.delta1)] * n1 + [(eps, dist.delta2)] * n2

    def obj(x):
        a, b = full(x[:n1], x[n1:])
        return float(np.sum(pair_joint_rdf(corr, a, b)))

    def jac(x):
        a, b = full(x[:n1], x[n1:])
        ga, gb = _pair_joint_rdf_grad(corr, a, b)
        return np.concatenate([ga[has1], gb[has2]])

    sel1 = np.r_[np.ones(n1), np.zeros(n2)]
    sel2 = np.r_[np.zeros(n1), np.ones(n2)]
    cons = [
        {"type": "eq", "fun": lambda x: dist.delta1 - x @ sel1, "jac": lambda x: -sel1},
        {"type": "eq", "fun": lambda x: dist.delta2 - x @ sel2, "jac": lambda x: -sel2},
    ]
    starts = [
        np.r_[w1 * dist.delta1 / max(w1.sum(), eps), w2 * dist.delta2 / max(w2.sum(), eps)],
        np.r_[np.full(n1, dist.delta1 / n1), np.full(n2, dist.delta2 / n2)],
    ]
    best_x, best = np.r_[w1, w2], analytic
    for x0 in starts:
        with warnings.catch_warnings():
            # SLSQP clips steps back into the bounds and says so; the clipped point is what we want
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(obj, x0, jac=jac, bounds=bounds, constraints=cons, method="SLSQP",
                           options={"ftol": 1e-15, "maxiter": 500})
        x = np.clip(res.x, eps, None)
        x[:n1] *= dist.delta1 / x[:n1].sum()
        x[n1:] *= dist.delta2 / x[n1:].sum()
        v = obj(x)
        if v < best:
            best_x, best = x, v

    grid_rate = None
    if n1 <= 2 and n2 <= 2 and grid_resolution:
        g1 = _alloc_grid(dist.delta1, grid_resolution) if n1 == 2 else (np.array([min(1.0, dist.delta1)]),)
        g2 = _alloc_grid(dist.delta2, grid_resolution) if n2 == 2 else (np.array([min(1.0, dist.delta2)]),)
        parts1 = np.stack(g1, -1) if n1 == 2 else g1[0][:, None]
        parts2 = np.stack(g2, -1) if n2 == 2 else g2[0][:, None]
        aa = np.ones((parts1.shape[0], parts2.shape[0], m))
        bb = np.ones_like(aa)
        aa[:, :, has1] = parts1[:, None, :]
        bb[:, :, has2] = parts2[None, :, :]
        grid_rate = float(np.min(np.sum(pair_joint_rdf(corr, aa, bb), axis=-1)))
        if best > grid_rate + GRID_DISAGREE_TOL:
            raise OracleDisagreement(f"solver {best:.9g} exceeds grid search {grid_rate:.9g}")

    a, b = full(best_x[:n1], best_x[n1:])
    return JointRdf(
        rate=best,
        allocation1=a[has1],
        allocation2=b[has2],
        analytic_rate=analytic,
        low_branch=analytic - best <= PLANE_TOL,
        grid_rate=grid_rate,
    )


# -- rate region -------------------------------------------------------------


def in_dw(d, distortion, tol=REGION_TOL):
    """Membership in ``{0 <= Delta_i <= sum_j (1 - d_j)}``; all of it when ``n = 0``."""
    dist = DistortionPair.of(distortion)
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if d.size == 0:
        return True
    cap = float(np.sum(1 - d))
    return dist.delta1 <= cap + tol and dist.delta2 <= cap + tol


@dataclass(frozen=True, eq=False)
class RateRegionPoint:
    R0: float
    R1: float
    R2: float
    distortion: DistortionPair
    Q_W: np.ndarray
    joint_rdf: float
    pangloss_gap: float
    on_pangloss_plane: bool
    in_D_W: bool
    general_qw: bool = False
    low_branch: bool = True

    @property
    def sum_rate(self):
        return self.R0 + self.R1 + self.R2

    def to_json(self):
        return {
            "R0": self.R0,
            "R1": self.R1,
            "R2": self.R2,
            "sum_rate": self.sum_rate,
            "delta1": self.distortion.delta1,
            "delta2": self.distortion.delta2,
            "Qw": np.asarray(self.Q_W).tolist(),
            "joint_rdf": self.joint_rdf,
            "pangloss_gap": self.pangloss_gap,
            "on_pangloss_plane": self.on_pangloss_plane,
            "in_D_W": self.in_D_W,
            "general_qw": self.general_qw,
            "joint_rdf_low_branch": self.low_branch,
        }


def _conditional_rates(d, qw, dist, extra1, extra2):
    if qw.is_diagonal:
        lv1 = conditional_levels(d, qw.q, 1)
        lv2 = conditional_levels(d, qw.q, 2)
    else:
        real = assemble_joint_covariance(d, qw)
        lv1 = np.maximum(np.linalg.eigvalsh(real.cov_Z1), 0.0)
        lv2 = np.maximum(np.linalg.eigvalsh(real.cov_Z2), 0.0)
    lv1 = np.concatenate([lv1, np.ones(extra1)])
    lv2 = np.concatenate([lv2, np.ones(extra2)])
    return reverse_water_filling_rate(lv1, dist.delta1), reverse_water_filling_rate(lv2, dist.delta2)


def gray_wyner_triple(decomp, qw, distortion, include_private=False, grid_resolution=400):
    """Rate triple ``(I(X1,X2;W), R_{X1|W}, R_{X2|W})`` for Gaussian ``W ~ G(0, Q_W)``.

    Non-diagonal ``Q_W`` is evaluated through the eigenvalues of the
    conditional covariances and flagged ``general_qw``.
    """
    d, p13, p23 = _d_of(decomp)
    dist = DistortionPair.of(distortion)
    if not isinstance(qw, QwParameter):
        qw = validate_qw(d, np.eye(d.size) if qw is None else qw)
    extra = (p13, p23) if include_private else (0, 0)
    r0 = lower_bound_given_qw(d, qw)
    r1, r2 = _conditional_rates(d, qw, dist, *extra)
    joint = joint_rdf_oracle(d, dist, grid_resolution=grid_resolution, private=extra)
    gap = r0 + r1 + r2 - joint.rate
    return RateRegionPoint(
        R0=r0,
        R1=r1,
        R2=r2,
        distortion=dist,
        Q_W=np.array(qw.Q_W),
        joint_rdf=joint.rate,
        pangloss_gap=gap,
        on_pangloss_plane=abs(gap) <= PLANE_TOL,
        in_D_W=in_dw(d, dist),
        general_qw=not qw.is_diagonal,
        low_branch=joint.low_branch,
    )


@dataclass(frozen=True, eq=False)
class WeightedResult:
    value: float
    qw: QwParameter
    sweeps: int


def weighted_functional(decomp, distortion, alpha1, alpha2, opt_tol=1e-10, max_sweeps=50):
    """Minimize ``I(X1,X2;W) + a1 R_{X1|W} + a2 R_{X2|W}`` over diagonal ``Q_W``.

    Coordinate descent with a golden-section search per coordinate on
    ``[d_j + opt_tol, 1/d_j - opt_tol]``; coordinates interact only through
    the water level.
    """
    if not (0 <= alpha1 <= 1 and 0 <= alpha2 <= 1 and alpha1 + alpha2 >= 1 - 1e-12):
        raise WeightsOutOfRange(f"need 0 <= alpha_i <= 1 and alpha1 + alpha2 >= 1, got ({alpha1}, {alpha2})")
    d, _, _ = _d_of(decomp)
    dist = DistortionPair.of(distortion)
    n = d.size
    if n == 0:
        return WeightedResult(0.0, validate_qw(d, np.zeros((0, 0))), 0)
    c0 = 0.5 * np.log1p(-(d**2))

    def total(q):
        lb = float(np.sum(c0 - 0.5 * np.log((1 - d / q) * (1 - d * q))))
        r1 = reverse_water_filling_rate(conditional_levels(d, q, 1), dist.delta1)
        r2 = reverse_water_filling_rate(conditional_levels(d, q, 2), dist.delta2)
        return lb + alpha1 * r1 + alpha2 * r2

    q = np.ones(n)
    value = total(q)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        prev = value
        for j in range(n):
            def along(x, j=j):
                qq = q.copy()
                qq[j] = x
                return total(qq)

            x, fx = golden_section(along, d[j] + opt_tol, 1 / d[j] - opt_tol, tol=opt_tol)
            if fx < value:
                q[j], value = x, fx
        if prev - value <= opt_tol:
            break
    return WeightedResult(value, validate_qw(d, np.diag(q)), sweeps)


def wyner_lossy_ci(decomp, distortion):
    """``(C_W, True)`` inside the validity region, ``(None, False)`` outside."""
    d, _, _ = _d_of(decomp)
    if not in_dw(d, distortion):
        return None, False
    return float(0.5 * np.sum(np.log1p(d) - np.log1p(-d))) if d.size else 0.0, True


@dataclass(frozen=True)
class BoundsReport:
    pangloss_slack: float
    marginal1_slack: float
    marginal2_slack: float
    tolerance: float = BOUND_TOL

    @property
    def passed(self):
        return min(self.pangloss_slack, self.marginal1_slack, self.marginal2_slack) >= -self.tolerance

    def to_json(self):
        return {
            "pangloss_slack": self.pangloss_slack,
            "marginal1_slack": self.marginal1_slack,
            "marginal2_slack": self.marginal2_slack,
            "passed": self.passed,
        }


def check_pangloss_and_marginal_bounds(point, decomp, distortion=None, include_private=False):
    """Slacks of ``R0+R1+R2 >= R_{X1,X2}``, ``R0+R1 >= R_X1``, ``R0+R2 >= R_X2``."""
    d, p13, p23 = _d_of(decomp)
    dist = point.distortion if distortion is None else DistortionPair.of(distortion)
    dim1 = d.size + (p13 if include_private else 0)
    dim2 = d.size + (p23 if include_private else 0)
    m1 = marginal_rdf(dim1, dist.delta1) if dim1 else 0.0
    m2 = marginal_rdf(dim2, dist.delta2) if dim2 else 0.0
    return BoundsReport(
        pangloss_slack=point.sum_rate - point.joint_rdf,
        marginal1_slack=point.R0 + point.R1 - m1,
        marginal2_slack=point.R0 + point.R2 - m2,
    )
