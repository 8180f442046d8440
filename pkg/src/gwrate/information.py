"""Mutual information, the conditional-independence lower bound and Wyner's
common information, all in nats, from canonical correlations."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ._search import bisect_sign_change
from .model import DEFAULT_TOL
from .realization import QwParameter, random_feasible_qw, validate_qw

log = logging.getLogger(__name__)

FALSIFY_TOL = 1e-8


def mutual_information(decomp):
    """``I(X1; X2)``: 0, ``-1/2 sum ln(1 - d^2)`` or infinity when ``p11 > 0``."""
    if decomp.p11 > 0:
        return math.inf
    d = np.asarray(decomp.d, dtype=float)
    if d.size == 0:
        return 0.0
    return float(-0.5 * np.sum(np.log1p(-(d**2))))


def wyner_ci_closed_form(d):
    d = np.asarray(d, dtype=float)
    if d.size == 0:
        return 0.0
    return float(0.5 * np.sum(np.log1p(d) - np.log1p(-d)))


def _bound_terms(d, Q):
    # batched: Q has shape (..., n, n)
    k = np.sqrt(d)
    n = d.size
    eye = np.eye(n)
    m1 = eye - k[:, None] * np.linalg.inv(Q) * k[None, :]
    m2 = eye - k[:, None] * Q * k[None, :]
    return m1, m2


def _lower_bound_batch(d, Qs):
    d = np.asarray(d, dtype=float)
    m1, m2 = _bound_terms(d, Qs)
    s1, l1 = np.linalg.slogdet(m1)
    s2, l2 = np.linalg.slogdet(m2)
    val = 0.5 * np.sum(np.log1p(-(d**2))) - 0.5 * (l1 + l2)
    return np.where((s1 > 0) & (s2 > 0), val, np.inf)


def lower_bound_given_qw(d, Q_W):
    """Lower bound on ``I(X1, X2; W)`` for a Gaussian ``W`` with covariance ``Q_W``.

    Infinite on the boundary of the feasible set, where one of the two
    determinant factors vanishes.
    """
    qw = Q_W if isinstance(Q_W, QwParameter) else validate_qw(d, Q_W)
    d = qw.d
    if d.size == 0:
        return 0.0
    if qw.boundary:
        return math.inf
    return float(_lower_bound_batch(d, np.array(qw.Q_W)))


def lower_bound_gradient(d, Q_W):
    """Gradient of the lower bound with respect to a symmetric ``Q_W``."""
    d = np.asarray(d, dtype=float)
    k = np.diag(np.sqrt(d))
    Q = np.asarray(Q_W, dtype=float)
    qi = np.linalg.inv(Q)
    m1, m2 = _bound_terms(d, Q)
    g = -0.5 * qi @ k @ np.linalg.inv(m1) @ k @ qi + 0.5 * k @ np.linalg.inv(m2) @ k
    return (g + g.T) / 2


def _coordinate_derivative(dj):
    # derivative of -1/2 ln((1 - d/q)(1 - d q)); single sign change at q = 1
    return lambda q: 0.5 * dj * (1.0 / (1.0 - dj * q) - 1.0 / (q * (q - dj)))


@dataclass
class LowerBoundMinimum:
    qw: QwParameter
    value: float
    search: str
    evaluated: int = 0
    below_closed_form: int = 0
    trace: list = field(default_factory=list)

    @property
    def Q_W(self):
        return np.array(self.qw.Q_W)


def _projected_descent(d, Q, value, steps=30):
    lo_d, hi_d = np.diag(d), np.diag(1 / d)
    step = 0.1
    for _ in range(steps):
        g = lower_bound_gradient(d, Q)
        gn = np.linalg.norm(g)
        if gn < 1e-14:
            break
        while step > 1e-12:
            cand = Q - step * g / gn
            if np.linalg.eigvalsh(cand - lo_d)[0] > FALSIFY_TOL and np.linalg.eigvalsh(hi_d - cand)[0] > FALSIFY_TOL:
                v = float(_lower_bound_batch(d, cand))
                if v < value:
                    Q, value = cand, v
                    step *= 1.5
                    break
            step *= 0.5
        else:
            break
    return Q, value


def minimize_lower_bound(d, search="diagonal", opt_tol=DEFAULT_TOL.opt_tol, seed=0, n_points=1000, n_polish=10):
    """Minimize the ``Q_W``-parametrized lower bound.

    ``search="diagonal"`` solves each coordinate on ``[d_j + opt_tol,
    1/d_j - opt_tol]`` by bisection on the sign of the derivative.
    ``search="full"`` is a randomized falsification search over symmetric
    feasible ``Q_W``: ``n_points`` seeded random draws, then projected
    gradient descent from the best ``n_polish`` of them.
    """
    d = np.atleast_1d(np.asarray(d, dtype=float))
    n = d.size
    if n == 0:
        return LowerBoundMinimum(validate_qw(d, np.zeros((0, 0))), 0.0, search)
    closed = wyner_ci_closed_form(d)

    if search == "diagonal":
        q = np.array([
            bisect_sign_change(_coordinate_derivative(dj), dj + opt_tol, 1 / dj - opt_tol, tol=opt_tol)
            for dj in d
        ])
        qw = validate_qw(d, np.diag(q))
        return LowerBoundMinimum(qw, lower_bound_given_qw(d, qw), search, evaluated=n)

    if search != "full":
        raise ValueError(f"unknown search mode {search!r}")
    rng = np.random.default_rng(seed)
    draws = np.stack([np.array(random_feasible_qw(d, rng).Q_W) for _ in range(n_points)])
    values = _lower_bound_batch(d, draws)
    below = int(np.sum(values < closed - FALSIFY_TOL))
    best_q, best_v = None, math.inf
    for i in np.argsort(values)[:n_polish]:
        Q, v = _projected_descent(d, draws[i], float(values[i]))
        below += int(v < closed - FALSIFY_TOL)
        if v < best_v:
            best_q, best_v = Q, v
    if below:
        log.warning("full search found %d points below the closed form", below)
    qw = validate_qw(d, best_q)
    return LowerBoundMinimum(qw, best_v, search, evaluated=n_points, below_closed_form=below)


@dataclass
class CommonInformation:
    value: float
    Q_W: np.ndarray
    note: str = ""


def wyner_common_information(decomp):
    """Closed form ``1/2 sum ln((1 + d)/(1 - d))`` with optimizer ``Q_W = I``."""
    if decomp.p11 > 0:
        msg = f"identical part present (p11={decomp.p11}); common information is infinite"
        log.warning(msg)
        return CommonInformation(math.inf, np.zeros((0, 0)), note=msg)
    n = decomp.n
    return CommonInformation(wyner_ci_closed_form(decomp.d), np.eye(n))


def gaussian_mi_from_covariance(cov, p1):
    """Plug-in Gaussian MI between the first ``p1`` coordinates and the rest."""
    cov = np.asarray(cov, dtype=float)
    _, l1 = np.linalg.slogdet(cov[:p1, :p1])
    _, l2 = np.linalg.slogdet(cov[p1:, p1:])
    _, l = np.linalg.slogdet(cov)
    return float(0.5 * (l1 + l2 - l))
