"""Jointly Gaussian source pairs and the shared linear-algebra kernels.

A pair ``(X1, X2)`` is described by its zero-mean joint covariance

    Q = [[Q_X1,    Q_X1X2],
         [Q_X1X2', Q_X2  ]]

with ``Q_X1`` of order ``p1`` and ``Q_X2`` of order ``p2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AsymmetryTooLarge,
    DimensionMismatch,
    InputError,
    NotPositiveSemidefinite,
)


@dataclass(frozen=True)
class NumericTolerances:
    """Floating point thresholds shared by every module.

    ``one_tol`` and ``zero_tol`` split canonical correlations into
    identical (``d >= 1 - one_tol``), correlated and private
    (``d <= zero_tol``) bands.
    """

    sym_tol: float = 1e-12
    psd_tol: float = 1e-10
    rank_tol: float = 1e-12
    one_tol: float = 1e-9
    zero_tol: float = 1e-12
    opt_tol: float = 1e-10

    def __post_init__(self):
        for name in ("sym_tol", "psd_tol", "rank_tol", "one_tol", "zero_tol", "opt_tol"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not 0 < self.zero_tol < 1 - self.one_tol:
            raise ValueError("classification bands overlap: need 0 < zero_tol < 1 - one_tol")


DEFAULT_TOL = NumericTolerances()


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def symmetrize(m):
    m = np.asarray(m, dtype=float)
    return (m + m.T) / 2


def sym_eigh(m):
    """Eigendecomposition of the symmetric part of ``m``, eigenvalues descending."""
    w, v = np.linalg.eigh(symmetrize(m))
    return w[::-1], v[:, ::-1]


def effective_rank(m, rank_tol=DEFAULT_TOL.rank_tol):
    w = np.linalg.eigvalsh(symmetrize(m))
    if w.size == 0:
        return 0
    top = max(w.max(), 0.0)
    if top == 0.0:
        return 0
    return int(np.sum(w > rank_tol * top))


def psd_sqrt(m, rank_tol=DEFAULT_TOL.rank_tol):
    """Symmetric PSD square root; eigenvalues below ``rank_tol * max`` are zeroed."""
    w, v = sym_eigh(m)
    if w.size == 0:
        return np.zeros((0, 0))
    top = max(w[0], 0.0)
    w = np.where(w > rank_tol * top, w, 0.0)
    return (v * np.sqrt(w)) @ v.T


def psd_inv_sqrt(m, rank_tol=DEFAULT_TOL.rank_tol):
    """Pseudo-inverse square root restricted to the range of ``m``."""
    w, v = sym_eigh(m)
    if w.size == 0:
        return np.zeros((0, 0))
    top = max(w[0], 0.0)
    keep = w > rank_tol * top
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ v.T


@dataclass(frozen=True, eq=False)
class JointGaussianPair:
    p1: int
    p2: int
    Q: np.ndarray
    rank1: int
    rank2: int

    @property
    def order(self):
        return self.p1 + self.p2

    @property
    def full_rank(self):
        return self.rank1 == self.p1 and self.rank2 == self.p2

    def to_json(self):
        return {"p1": self.p1, "p2": self.p2, "Q": self.Q.tolist()}


def validate_joint_covariance(raw_matrix, p1, p2, tol=DEFAULT_TOL):
    """Check and wrap a raw joint covariance.

    The matrix is symmetrized as ``(Q + Q') / 2`` before the PSD test so the
    stored matrix is exactly symmetric.  Rank deficiency in either marginal
    is allowed; the effective dimensions are recorded as ``rank1``/``rank2``.
    """
    p1, p2 = int(p1), int(p2)
    if p1 < 1 or p2 < 1:
        raise DimensionMismatch(f"dimensions must be positive, got p1={p1}, p2={p2}")
    m = np.asarray(raw_matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != p1 + p2:
        raise DimensionMismatch(f"expected a square matrix of order {p1 + p2}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("covariance contains non-finite entries")

    scale = max(1.0, float(np.max(np.abs(m))))
    asym = float(np.max(np.abs(m - m.T)))
    if asym > tol.sym_tol * scale:
        raise AsymmetryTooLarge(f"max |Q - Q'| = {asym:.3e} exceeds {tol.sym_tol:.1e}")
    q = symmetrize(m)

    w = np.linalg.eigvalsh(q)
    top = max(float(w[-1]), 0.0)
    if w[0] < -tol.psd_tol * top or (top == 0.0 and w[0] < 0.0):
        raise NotPositiveSemidefinite(f"smallest eigenvalue {w[0]:.6g} (largest {w[-1]:.6g})")

    return JointGaussianPair(
        p1=p1,
        p2=p2,
        Q=_frozen(q),
        rank1=effective_rank(q[:p1, :p1], tol.rank_tol),
        rank2=effective_rank(q[p1:, p1:], tol.rank_tol),
    )


def block(pair, which):
    """Copy of one block: ``"X1"``, ``"X2"`` or ``"cross"`` (``Q_X1X2``)."""
    p1 = pair.p1
    if which in ("X1", "x1", 1):
        return pair.Q[:p1, :p1].copy()
    if which in ("X2", "x2", 2):
        return pair.Q[p1:, p1:].copy()
    if which in ("cross", "X1X2", "x1x2", 12):
        return pair.Q[:p1, p1:].copy()
    raise ValueError(f"unknown block selector {which!r}")


def scalar_pair(rho, var1=1.0, var2=1.0):
    c = rho * np.sqrt(var1 * var2)
    return validate_joint_covariance([[var1, c], [c, var2]], 1, 1)


def canonical_pair(d, p13=0, p23=0):
    """Pair already in canonical variable form with correlations ``d``."""
    d = np.asarray(d, dtype=float)
    n = d.size
    p1, p2 = n + p13, n + p23
    q = np.eye(p1 + p2)
    q[np.arange(n), p1 + np.arange(n)] = d
    q[p1 + np.arange(n), np.arange(n)] = d
    return validate_joint_covariance(q, p1, p2)


def load_pair(path, tol=DEFAULT_TOL):
    """Read the ``{"p1", "p2", "Q"}`` JSON covariance format."""
    try:
        data = json.loads(Path(path).read_text())
        return validate_joint_covariance(data["Q"], data["p1"], data["p2"], tol)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot parse covariance file {path}: {exc}") from exc
