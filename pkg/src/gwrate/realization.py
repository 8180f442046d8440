"""Conditionally independent Gaussian realizations of a canonical pair.

For correlations ``d`` (``D = diag(d)``) and a covariance ``Q_W`` with
``D <= Q_W <= D^{-1}``, the triple

    X12 = D^{1/2} Q_W^{-1} W + Z1,   cov Z1 = I - D^{1/2} Q_W^{-1} D^{1/2}
    X22 = D^{1/2} W + Z2,            cov Z2 = I - D^{1/2} Q_W D^{1/2}

with ``W, Z1, Z2`` independent reproduces ``cov(X12, X22) = [[I, D], [D, I]]``
and makes ``X12`` and ``X22`` conditionally independent given ``W``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IdenticalPartPresent, InfeasibleQw, NumericalBreakdown, SingularQw
from .model import psd_sqrt, symmetrize

FEAS_TOL = 1e-10
CI_TOL = 1e-12


def _as_d(d):
    d = np.atleast_1d(np.asarray(d, dtype=float))
    if d.ndim != 1:
        raise DimensionMismatch("correlation vector must be one-dimensional")
    if np.any((d <= 0) | (d >= 1)):
        raise InfeasibleQw(f"canonical correlations must lie in (0, 1), got {d}")
    return d


@dataclass(frozen=True, eq=False)
class QwParameter:
    d: np.ndarray
    Q_W: np.ndarray
    lower_margin: float
    upper_margin: float

    @property
    def n(self):
        return self.d.size

    @property
    def boundary(self):
        return min(self.lower_margin, self.upper_margin) <= FEAS_TOL

    @property
    def is_diagonal(self):
        return bool(np.all(self.Q_W == np.diag(np.diag(self.Q_W))))

    @property
    def q(self):
        return np.diag(self.Q_W).copy()


def validate_qw(d, candidate, tol=FEAS_TOL):
    """Check ``D <= Q_W <= D^{-1}``; boundary contact is accepted and flagged."""
    d = _as_d(d)
    n = d.size
    c = np.atleast_2d(np.asarray(candidate, dtype=float)) if n else np.zeros((0, 0))
    if c.shape != (n, n):
        raise DimensionMismatch(f"Q_W must be {n}x{n}, got {c.shape}")
    qw = symmetrize(c)
    if n == 0:
        lo = hi = np.inf
    else:
        lo = float(np.linalg.eigvalsh(qw - np.diag(d))[0])
        hi = float(np.linalg.eigvalsh(np.diag(1 / d) - qw)[0])
    if lo < -tol:
        raise InfeasibleQw(f"Q_W - D has eigenvalue {lo:.6g} < 0", eigenvalue=lo, side="lower")
    if hi < -tol:
        raise InfeasibleQw(f"D^-1 - Q_W has eigenvalue {hi:.6g} < 0", eigenvalue=hi, side="upper")
    d = d.copy()
    d.setflags(write=False)
    qw.setflags(write=False)
    return QwParameter(d=d, Q_W=qw, lower_margin=lo, upper_margin=hi)


def identity_qw(d):
    d = _as_d(d)
    return validate_qw(d, np.eye(d.size))


def random_feasible_qw(d, rng, diagonal=False, interior=0.999):
    """Random element of the feasible set, deterministic given ``rng``.

    A random convex combination ``t D + (1 - t) D^{-1}`` is pushed along a
    random symmetric direction by a uniform fraction of the largest feasible
    step.  ``interior < 1`` keeps the draw off the boundary.
    """
    d = _as_d(d)
    n = d.size
    t = rng.uniform(0.0, 1.0)
    base = np.diag(t * d + (1 - t) / d)
    if diagonal:
        direction = np.diag(rng.uniform(-1.0, 1.0, n))
    else:
        a = rng.uniform(-1.0, 1.0, (n, n))
        direction = (a + a.T) / 2
    norm = np.linalg.norm(direction, 2)
    if norm == 0:
        return validate_qw(d, base)
    direction = direction / norm

    # largest s keeping base + s*direction between D and D^-1; both gaps are diagonal
    s_max = np.inf
    for gap, sign in (((1 - t) * (1 / d - d), 1.0), (t * (1 / d - d), -1.0)):
        if np.all(gap > 0):
            h = 1 / np.sqrt(gap)
            top = np.linalg.eigvalsh(-sign * h[:, None] * direction * h[None, :])[-1]
            if top > 0:
                s_max = min(s_max, 1 / top)
        else:
            s_max = 0.0
    s = rng.uniform(0.0, 1.0) * s_max
    center = np.diag((d + 1 / d) / 2)
    q = base + s * direction
    q = center + interior * (q - center)
    return validate_qw(d, q)


@dataclass(frozen=True, eq=False)
class WeakRealization:
    d: np.ndarray
    Q_W: np.ndarray
    A1: np.ndarray
    cov_Z1: np.ndarray
    A2: np.ndarray
    cov_Z2: np.ndarray
    Q_s: np.ndarray
    degenerate: bool

    @property
    def n(self):
        return self.d.size

    def to_json(self):
        return {
            "A1": self.A1.tolist(),
            "covZ1": self.cov_Z1.tolist(),
            "A2": self.A2.tolist(),
            "covZ2": self.cov_Z2.tolist(),
            "Qw": self.Q_W.tolist(),
            "Qs": self.Q_s.tolist(),
        }


def joint_covariance_template(d, Q_W):
    """The 3n x 3n covariance of ``(X12, X22, W)``."""
    n = d.size
    D = np.diag(d)
    Dh = np.diag(np.sqrt(d))
    qs = np.empty((3 * n, 3 * n))
    qs[:n, :n] = np.eye(n)
    qs[:n, n : 2 * n] = D
    qs[:n, 2 * n :] = Dh
    qs[n : 2 * n, :n] = D
    qs[n : 2 * n, n : 2 * n] = np.eye(n)
    qs[n : 2 * n, 2 * n :] = Dh @ Q_W
    qs[2 * n :, :n] = Dh
    qs[2 * n :, n : 2 * n] = Q_W @ Dh
    qs[2 * n :, 2 * n :] = Q_W
    return qs


def assemble_joint_covariance(d, qw):
    """Build the realization matrices and ``Q_s`` for a feasible ``Q_W``."""
    if not isinstance(qw, QwParameter):
        qw = validate_qw(d, qw)
    d = qw.d
    n = d.size
    Q_W = np.array(qw.Q_W)
    Dh = np.diag(np.sqrt(d))
    Q_W_inv = np.linalg.inv(Q_W) if n else np.zeros((0, 0))
    A1 = Dh @ Q_W_inv
    cov_Z1 = symmetrize(np.eye(n) - Dh @ Q_W_inv @ Dh)
    A2 = Dh.copy()
    cov_Z2 = symmetrize(np.eye(n) - Dh @ Q_W @ Dh)
    z_min = min(
        np.linalg.eigvalsh(cov_Z1)[0] if n else 0.0,
        np.linalg.eigvalsh(cov_Z2)[0] if n else 0.0,
    )
    if z_min < -FEAS_TOL:
        raise NumericalBreakdown(f"noise covariance has eigenvalue {z_min:.3e}")
    qs = joint_covariance_template(d, Q_W)
    for a in (A1, cov_Z1, A2, cov_Z2, qs, Q_W):
        a.setflags(write=False)
    return WeakRealization(
        d=d,
        Q_W=Q_W,
        A1=A1,
        cov_Z1=cov_Z1,
        A2=A2,
        cov_Z2=cov_Z2,
        Q_s=qs,
        degenerate=bool(z_min <= FEAS_TOL),
    )


def conditional_independence_gap(real):
    """Max entry of ``Q_{X12,X22} - Q_{X12,W} Q_W^{-1} Q_{W,X22}``.

    The W-covariances are those implied by the realization gains, the target
    cross covariance is read from ``Q_s``.
    """
    n = real.n
    if n == 0:
        return 0.0
    Q_W = real.Q_W
    if np.linalg.cond(Q_W) > 1e12:
        raise SingularQw("Q_W is numerically singular")
    cross_target = real.Q_s[:n, n : 2 * n]
    c1w = real.A1 @ Q_W
    cw2 = Q_W @ real.A2.T
    gap = cross_target - c1w @ np.linalg.solve(Q_W, cw2)
    return float(np.max(np.abs(gap)))


def sample(real, count, seed):
    """Draw ``count`` rows ``(X12, X22, W)`` from the realization."""
    n = real.n
    count = int(count)
    if count <= 0:
        return np.zeros((0, 3 * n))
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, 3 * n))
    w = g[:, :n] @ psd_sqrt(real.Q_W).T
    z1 = g[:, n : 2 * n] @ psd_sqrt(real.cov_Z1).T
    z2 = g[:, 2 * n :] @ psd_sqrt(real.cov_Z2).T
    return np.hstack([w @ real.A1.T + z1, w @ real.A2.T + z2, w])


def empirical_covariance(samples):
    samples = np.asarray(samples, dtype=float)
    return samples.T @ samples / samples.shape[0]


def lift_to_original(decomp, real, samples, seed=0):
    """Map ``(X12, X22, W)`` samples back to samples of the original ``(X1, X2)``.

    Private coordinates are filled with fresh independent unit Gaussians and
    coordinates outside the range of a singular marginal are zero.
    """
    if decomp.p11 > 0:
        raise IdenticalPartPresent("realization excludes identical components (p11 > 0)")
    n = decomp.n
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 3 * n or real.n != n:
        raise DimensionMismatch(f"expected samples with {3 * n} columns")
    count = samples.shape[0]
    rng = np.random.default_rng(seed)

    def canonical_block(correlated, p, rank):
        out = np.zeros((count, p))
        out[:, :n] = correlated
        out[:, n:rank] = rng.standard_normal((count, rank - n))
        return out

    x1c = canonical_block(samples[:, :n], decomp.p1, decomp.rank1)
    x2c = canonical_block(samples[:, n : 2 * n], decomp.p2, decomp.rank2)
    x1 = np.linalg.solve(decomp.S1, x1c.T).T
    x2 = np.linalg.solve(decomp.S2, x2c.T).T
    return np.hstack([x1, x2])
