"""Truncated Fourier loops with leafwise boundary conditions.

A loop on ``[0, 1]`` is written

    x(t) = sum_m exp(m pi t J) a_m + sum_m exp(2 m pi t J) b_m,   |m| <= M,

with ``a_m`` in V0 and ``b_m`` in V1. The a-modes are half-periodic, the
b-modes periodic, so every such loop starts and ends in R^{n,k} with
``x(1) - x(0)`` in V0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .symplectic import CoisoIndex, apply_J


def _rotate(theta: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """``sum_m exp(theta_m J) c_m`` for ``theta`` of shape (T, K) and ``coeffs`` (K, 2n)."""
    return np.cos(theta) @ coeffs + np.sin(theta) @ apply_J(coeffs)


@dataclass(frozen=True, eq=False)
class FourierLoop:
    """Loop with a-modes ``a[m + M]`` in V0 and b-modes ``b[m + M]`` in V1."""

    idx: CoisoIndex
    M: int
    a: np.ndarray
    b: np.ndarray
    modes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"truncation order must be positive, got {self.M}")
        shape = (2 * self.M + 1, self.idx.dim)
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        if a.shape != shape or b.shape != shape:
            raise ValueError(f"coefficient arrays must have shape {shape}, got {a.shape} and {b.shape}")
        off_a = np.delete(a, self.idx.v0_slots, axis=1)
        off_b = np.delete(b, self.idx.v1_slots, axis=1)
        if np.any(off_a) or np.any(off_b):
            raise ValueError("a-modes must lie in V0 and b-modes in V1")
        for arr in (a, b):
            arr.setflags(write=False)
        modes = np.arange(-self.M, self.M + 1)
        modes.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "modes", modes)

    @classmethod
    def zeros(cls, idx: CoisoIndex, M: int) -> "FourierLoop":
        z = np.zeros((2 * M + 1, idx.dim))
        return cls(idx, M, z, z)

    def __add__(self, other: "FourierLoop") -> "FourierLoop":
        if other.idx != self.idx or other.M != self.M:
            raise ValueError("loops must share index and truncation")
        return FourierLoop(self.idx, self.M, self.a + other.a, self.b + other.b)

    def __mul__(self, lam: float) -> "FourierLoop":
        return FourierLoop(self.idx, self.M, lam * self.a, lam * self.b)

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {
            "n": self.idx.n,
            "k": self.idx.k,
            "M": self.M,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FourierLoop":
        idx = CoisoIndex(int(d["n"]), int(d["k"]))
        return cls(idx, int(d["M"]), np.asarray(d["a"]), np.asarray(d["b"]))


def evaluate(loop: FourierLoop, t) -> np.ndarray:
    """Point ``x(t)``; ``t`` may be a scalar or 1-d array."""
    t = np.asarray(t, dtype=float)
    tt = np.atleast_1d(t)[:, None]
    m = loop.modes[None, :]
    x = _rotate(np.pi * m * tt, loop.a) + _rotate(2 * np.pi * m * tt, loop.b)
    return x[0] if t.ndim == 0 else x


def velocity(loop: FourierLoop, t) -> np.ndarray:
    """Termwise derivative ``x'(t)``."""
    t = np.asarray(t, dtype=float)
    tt = np.atleast_1d(t)[:, None]
    m = loop.modes[None, :]
    # d/dt exp(c t J) v = c J exp(c t J) v
    wa = (np.pi * loop.modes)[:, None] * loop.a
    wb = (2 * np.pi * loop.modes)[:, None] * loop.b
    x = apply_J(_rotate(np.pi * m * tt, wa) + _rotate(2 * np.pi * m * tt, wb))
    return x[0] if t.ndim == 0 else x


def action(loop: FourierLoop) -> float:
    """``1/2 int <-J x', x> dt`` in closed form: ``pi/2 sum_m m (|a_m|^2 + 2 |b_m|^2)``."""
    m = loop.modes
    return float(0.5 * np.pi * np.sum(m * (np.sum(loop.a**2, axis=1) + 2 * np.sum(loop.b**2, axis=1))))


def h_half_split(loop: FourierLoop) -> tuple[float, float, float]:
    """Norms of the ``E+``, ``E0``, ``E-`` components in the ``H^{1/2}`` inner product.

    The weights are ``pi |m|`` for a-modes and ``pi |2m|`` for b-modes; the
    constant modes form ``E0``.
    """
    m = loop.modes
    sa = np.sum(loop.a**2, axis=1)
    sb = np.sum(loop.b**2, axis=1)
    weighted = np.pi * (np.abs(m) * sa + 2 * np.abs(m) * sb)
    plus = float(np.sqrt(np.sum(weighted[m > 0])))
    minus = float(np.sqrt(np.sum(weighted[m < 0])))
    zero = float(np.sqrt(sa[m == 0].sum() + sb[m == 0].sum()))
    return plus, zero, minus


def zero_mean_gauge(loop: FourierLoop) -> FourierLoop:
    """Drop the constant modes ``a_0``, ``b_0``."""
    a = loop.a.copy()
    b = loop.b.copy()
    a[loop.M] = 0.0
    b[loop.M] = 0.0
    return FourierLoop(loop.idx, loop.M, a, b)


def random_loop(idx: CoisoIndex, M: int, rng: np.random.Generator, decay: float = 2.0) -> FourierLoop:
    """Gaussian coefficients with ``|m|^{-decay}`` fall-off (``|m| = 0`` treated as 1)."""
    m = np.arange(-M, M + 1)
    w = np.maximum(np.abs(m), 1.0) ** (-decay)
    a = np.zeros((2 * M + 1, idx.dim))
    b = np.zeros((2 * M + 1, idx.dim))
    a[:, idx.v0_slots] = rng.standard_normal((2 * M + 1, len(idx.v0_slots))) * w[:, None]
    b[:, idx.v1_slots] = rng.standard_normal((2 * M + 1, len(idx.v1_slots))) * w[:, None]
    return FourierLoop(idx, M, a, b)
