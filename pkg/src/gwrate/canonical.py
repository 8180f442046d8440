"""Canonical variable form of a jointly Gaussian pair.

Whitening each marginal and taking the SVD of the whitened cross
covariance yields nonsingular ``S1``, ``S2`` such that

    blkdiag(S1, S2) Q blkdiag(S1, S2)'

has identity marginal blocks and a cross block of the form
``diag(I_p11, diag(d), 0)``.  Coordinates are ordered identical,
correlated, private.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NumericalBreakdown, RankDeficientMarginal, SingularTransformation
from .model import DEFAULT_TOL, block, sym_eigh, symmetrize, validate_joint_covariance

CANONICAL_TOL = 1e-8
_CS_SLACK = 1e-10
_MAX_COND = 1e12


@dataclass(frozen=True, eq=False)
class CanonicalDecomposition:
    S1: np.ndarray
    S2: np.ndarray
    d: np.ndarray
    p11: int
    p12: int
    p13: int
    p21: int
    p22: int
    p23: int
    rank1: int
    rank2: int

    @property
    def n(self):
        return self.p12

    @property
    def p1(self):
        return self.S1.shape[0]

    @property
    def p2(self):
        return self.S2.shape[0]

    def to_json(self):
        return {
            "S1": self.S1.tolist(),
            "S2": self.S2.tolist(),
            "d": self.d.tolist(),
            "p11": self.p11,
            "p12": self.p12,
            "p13": self.p13,
            "p21": self.p21,
            "p22": self.p22,
            "p23": self.p23,
        }


def _whitener(cov, rank_tol):
    # rows of the returned matrix whiten the range; null holds the kernel basis
    w, v = sym_eigh(cov)
    top = max(w[0], 0.0) if w.size else 0.0
    r = int(np.sum(w > rank_tol * top)) if top > 0 else 0
    white = (v[:, :r] / np.sqrt(w[:r])).T
    return white, v[:, :r], v[:, r:].T


def _fix_signs(left, right, k):
    # largest-magnitude entry of each left vector made positive; pairs flip together
    left = left.copy()
    right = right.copy()
    for j in range(left.shape[1]):
        col = left[:, j]
        if col.size == 0:
            continue
        if col[np.argmax(np.abs(col))] < 0:
            left[:, j] = -col
            if j < k:
                right[:, j] = -right[:, j]
    for j in range(k, right.shape[1]):
        col = right[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            right[:, j] = -col
    return left, right


def canonical_decomposition(pair, tol=DEFAULT_TOL, allow_rank_deficient=True):
    """Compute ``(S1, S2, d)`` and the identical/correlated/private partition."""
    if not pair.full_rank and not allow_rank_deficient:
        raise RankDeficientMarginal(
            f"marginal ranks ({pair.rank1}, {pair.rank2}) below dimensions ({pair.p1}, {pair.p2})"
        )
    p1, p2 = pair.p1, pair.p2
    w1, basis1, null1 = _whitener(block(pair, "X1"), tol.rank_tol)
    w2, basis2, null2 = _whitener(block(pair, "X2"), tol.rank_tol)
    r1, r2 = w1.shape[0], w2.shape[0]

    c = w1 @ block(pair, "cross") @ w2.T
    if r1 and r2:
        u, sigma, vt = np.linalg.svd(c, full_matrices=True)
    else:
        u, sigma, vt = np.eye(r1), np.zeros(0), np.eye(r2)
    k = sigma.size
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    u = np.concatenate([u[:, order], u[:, k:]], axis=1)
    v = np.concatenate([vt.T[:, order], vt.T[:, k:]], axis=1)

    if k and sigma[0] > 1 + 1e-6:
        raise NumericalBreakdown(f"whitened cross covariance has singular value {sigma[0]:.6g} > 1")

    # sign convention is judged in symmetric-whitening coordinates
    lu, rv = _fix_signs(basis1 @ u, basis2 @ v, k)
    u, v = basis1.T @ lu, basis2.T @ rv

    s1 = np.vstack([u.T @ w1, null1]) if r1 else null1.copy()
    s2 = np.vstack([v.T @ w2, null2]) if r2 else null2.copy()

    identical = sigma >= 1 - tol.one_tol
    correlated = (sigma > tol.zero_tol) & ~identical
    p11 = int(identical.sum())
    n = int(correlated.sum())
    d = np.minimum(sigma[correlated], 1.0)
    s1.setflags(write=False)
    s2.setflags(write=False)
    d.setflags(write=False)
    return CanonicalDecomposition(
        S1=s1,
        S2=s2,
        d=d,
        p11=p11,
        p12=n,
        p13=p1 - p11 - n,
        p21=p11,
        p22=n,
        p23=p2 - p11 - n,
        rank1=r1,
        rank2=r2,
    )


def apply_transformation(pair, S1, S2, tol=DEFAULT_TOL):
    """Return the pair with covariance ``blkdiag(S1, S2) Q blkdiag(S1, S2)'``."""
    S1 = np.atleast_2d(np.asarray(S1, dtype=float))
    S2 = np.atleast_2d(np.asarray(S2, dtype=float))
    if S1.shape != (pair.p1, pair.p1) or S2.shape != (pair.p2, pair.p2):
        raise DimensionMismatch(f"transformation shapes {S1.shape}, {S2.shape} do not match ({pair.p1}, {pair.p2})")
    for name, s in (("S1", S1), ("S2", S2)):
        cond = np.linalg.cond(s)
        if not np.isfinite(cond) or cond > _MAX_COND:
            raise SingularTransformation(f"{name} has condition number {cond:.3e}")
    p1 = pair.p1
    s = np.zeros((pair.order, pair.order))
    s[:p1, :p1] = S1
    s[p1:, p1:] = S2
    # the product is symmetric in exact arithmetic; drop the round-off before validation
    return validate_joint_covariance(symmetrize(s @ pair.Q @ s.T), pair.p1, pair.p2, tol)


def canonical_template(decomp):
    """The covariance the transformed pair is expected to have."""
    p1, p2 = decomp.p1, decomp.p2
    t = np.zeros((p1 + p2, p1 + p2))
    t[np.arange(decomp.rank1), np.arange(decomp.rank1)] = 1.0
    t[p1 + np.arange(decomp.rank2), p1 + np.arange(decomp.rank2)] = 1.0
    coupling = np.concatenate([np.ones(decomp.p11), decomp.d])
    idx = np.arange(coupling.size)
    t[idx, p1 + idx] = coupling
    t[p1 + idx, idx] = coupling
    return t


@dataclass(frozen=True)
class CanonicalCheck:
    dev_X1: float
    dev_X2: float
    dev_cross: float
    tolerance: float = CANONICAL_TOL

    @property
    def max_deviation(self):
        return max(self.dev_X1, self.dev_X2, self.dev_cross)

    @property
    def passed(self):
        return self.max_deviation <= self.tolerance

    def to_json(self):
        return {
            "dev_X1": self.dev_X1,
            "dev_X2": self.dev_X2,
            "dev_cross": self.dev_cross,
            "max_deviation": self.max_deviation,
            "passed": self.passed,
        }


def verify_canonical_form(decomp, pair, tolerance=CANONICAL_TOL):
    """Entrywise deviation of the transformed covariance from the canonical template."""
    p1 = pair.p1
    s = np.zeros((pair.order, pair.order))
    s[:p1, :p1] = decomp.S1
    s[p1:, p1:] = decomp.S2
    diff = np.abs(s @ pair.Q @ s.T - canonical_template(decomp))
    return CanonicalCheck(
        dev_X1=float(diff[:p1, :p1].max()),
        dev_X2=float(diff[p1:, p1:].max()),
        dev_cross=float(diff[:p1, p1:].max()),
        tolerance=tolerance,
    )


def singular_values_in_unit_interval(pair, tol=DEFAULT_TOL):
    """Raw singular values of the whitened cross covariance (Cauchy-Schwarz check)."""
    w1, _, _ = _whitener(block(pair, "X1"), tol.rank_tol)
    w2, _, _ = _whitener(block(pair, "X2"), tol.rank_tol)
    if w1.shape[0] == 0 or w2.shape[0] == 0:
        return np.zeros(0), True
    sigma = np.linalg.svd(w1 @ block(pair, "cross") @ w2.T, compute_uv=False)
    return sigma, bool(np.all((sigma >= -_CS_SLACK) & (sigma <= 1 + _CS_SLACK)))
