"""Linear symplectic algebra on R^{2n} with a coisotropic subspace R^{n,k}.

Coordinates are ordered ``(q_1, ..., q_n, p_1, ..., p_n)`` everywhere in the
package. The complex structure is ``J (q, p) = (p, -q)`` and the symplectic
form is ``omega0(u, v) = <-J u, v>``, so that ``omega0(e_i, e_{n+i}) = 1``.

For ``0 <= k <= n`` the subspaces are

* ``R^{n,k}``: all q-coordinates and ``p_1..p_k``;
* ``V0``: ``q_{k+1}..q_n`` (the leaves of R^{n,k});
* ``V1``: ``q_1..q_k`` and ``p_1..p_k``;
* ``JV0``: ``p_{k+1}..p_n``, the orthogonal complement of R^{n,k}.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class CoisoIndex:
    """The pair ``(n, k)`` selecting R^{n,k} inside R^{2n}."""

    n: int
    k: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if int(self.k) != self.k or not 0 <= self.k <= self.n:
            raise ValueError(f"k must satisfy 0 <= k <= n={self.n}, got {self.k!r}")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @cached_property
    def v0_slots(self) -> np.ndarray:
        return np.arange(self.k, self.n)

    @cached_property
    def v1_slots(self) -> np.ndarray:
        return np.concatenate([np.arange(self.k), self.n + np.arange(self.k)])

    @cached_property
    def rnk_slots(self) -> np.ndarray:
        return np.concatenate([np.arange(self.n), self.n + np.arange(self.k)])

    @cached_property
    def jv0_slots(self) -> np.ndarray:
        return self.n + np.arange(self.k, self.n)

    def slots(self, which: str) -> np.ndarray:
        try:
            return {
                "Rnk": self.rnk_slots,
                "V0": self.v0_slots,
                "V1": self.v1_slots,
                "JV0": self.jv0_slots,
            }[which]
        except KeyError:
            raise ValueError(f"unknown subspace {which!r}; expected Rnk, V0, V1 or JV0") from None


def _as_phase(v, n: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0 or v.shape[-1] % 2:
        raise ValueError(f"phase-space vectors need an even trailing dimension, got shape {v.shape}")
    if n is not None and v.shape[-1] != 2 * n:
        raise ValueError(f"expected trailing dimension {2 * n}, got {v.shape[-1]}")
    return v


def j_matrix(n: int) -> np.ndarray:
    """Matrix of ``J``: ``J @ (q, p) = (p, -q)``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def apply_J(v) -> np.ndarray:
    """Apply the complex structure ``(q, p) -> (p, -q)`` along the last axis."""
    v = _as_phase(v)
    n = v.shape[-1] // 2
    return np.concatenate([v[..., n:], -v[..., :n]], axis=-1)


def omega0(u, v) -> np.ndarray | float:
    """Standard symplectic form ``<-J u, v>``, broadcast over leading axes."""
    u = _as_phase(u)
    v = _as_phase(v)
    if u.shape[-1] != v.shape[-1]:
        raise ValueError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    n = u.shape[-1] // 2
    # <-J u, v> = sum_i q_i(u) p_i(v) - p_i(u) q_i(v)
    out = np.sum(u[..., :n] * v[..., n:] - u[..., n:] * v[..., :n], axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def project(v, which: str, idx: CoisoIndex) -> np.ndarray:
    """Orthogonal projection onto one of ``Rnk``, ``V0``, ``V1``, ``JV0``."""
    v = _as_phase(v, idx.n)
    out = np.zeros_like(v)
    s = idx.slots(which)
    out[..., s] = v[..., s]
    return out


def projector(which: str, idx: CoisoIndex) -> np.ndarray:
    """The projection of :func:`project` as a ``2n x 2n`` matrix."""
    return project(np.eye(idx.dim), which, idx)


def in_subspace(v, which: str, idx: CoisoIndex, tol: float = DEFAULT_TOL) -> bool:
    v = _as_phase(v, idx.n)
    return bool(np.all(np.abs(v - project(v, which, idx)) <= tol))


def leaf_equivalent(x, y, idx: CoisoIndex, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``x, y`` lie in R^{n,k} and ``x - y`` lies in V0 (all within ``tol``)."""
    x = _as_phase(x, idx.n)
    y = _as_phase(y, idx.n)
    return (
        in_subspace(x, "Rnk", idx, tol)
        and in_subspace(y, "Rnk", idx, tol)
        and in_subspace(x - y, "V0", idx, tol)
    )


def leaf_residual(x, y, idx: CoisoIndex) -> float:
    """Largest violation of the leaf relation between ``x`` and ``y``.

    Zero iff both points are in R^{n,k} and their difference is in V0.
    """
    x = _as_phase(x, idx.n)
    y = _as_phase(y, idx.n)
    off = np.concatenate(
        [
            np.abs(x[..., idx.jv0_slots]),
            np.abs(y[..., idx.jv0_slots]),
            np.abs((x - y)[..., idx.v1_slots]),
        ],
        axis=-1,
    )
    return float(off.max(initial=0.0))


def is_symplectic(M, tol: float = 1e-10) -> bool:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        return False
    J = j_matrix(M.shape[0] // 2)
    scale = max(1.0, float(np.abs(M).max()) ** 2)
    return bool(np.abs(M.T @ J @ M - J).max() <= tol * scale)


class Membership(enum.Enum):
    MEMBER = "member"
    NOT_SYMPLECTIC = "not_symplectic"
    NOT_FIXING = "symplectic_not_in_sp2nk"


def sp2nk_membership(M, idx: CoisoIndex, tol: float = 1e-10) -> Membership:
    """Classify ``M`` relative to the subgroup Sp(2n, k).

    Matrices that fail ``M^T J M = J`` are reported as ``NOT_SYMPLECTIC``; the
    block test is only applied to symplectic input.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (idx.dim, idx.dim) or not is_symplectic(M, tol):
        return Membership.NOT_SYMPLECTIC
    B = _shear_block(M, idx)
    expected = np.eye(idx.dim)
    expected[idx.k : idx.n, idx.n + idx.k :] = B
    if np.abs(M - expected).max() > tol * max(1.0, float(np.abs(M).max())):
        return Membership.NOT_FIXING
    if B.size and np.abs(B - B.T).max() > tol:
        return Membership.NOT_FIXING
    return Membership.MEMBER


def in_sp2nk(M, idx: CoisoIndex, tol: float = 1e-10) -> bool:
    """True iff ``M`` is symplectic and fixes R^{n,k} pointwise."""
    return sp2nk_membership(M, idx, tol) is Membership.MEMBER


def _shear_block(M: np.ndarray, idx: CoisoIndex) -> np.ndarray:
    n, k = idx.n, idx.k
    return M[k:n, n + k :]


def sp2nk_sample(idx: CoisoIndex, B) -> np.ndarray:
    """Element of Sp(2n, k) with free symmetric block ``B``.

    The matrix is the identity except for the shear
    ``q_{k+j} -> q_{k+j} + sum_l B[j, l] p_{k+l}``; it fixes every vector of
    R^{n,k} and is symplectic exactly when ``B`` is symmetric.
    """
    n, k = idx.n, idx.k
    B = np.atleast_2d(np.asarray(B, dtype=float)) if n > k else np.zeros((0, 0))
    if B.shape != (n - k, n - k):
        raise ValueError(f"B must be {(n - k)}x{(n - k)}, got {B.shape}")
    if n > k and np.abs(B - B.T).max() > 1e-12 * max(1.0, float(np.abs(B).max())):
        raise ValueError("B must be symmetric")
    A = np.eye(2 * n)
    A[k:n, n + k :] = B
    return A
