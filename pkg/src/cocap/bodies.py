"""Convex bodies through their Minkowski gauge and support function.

Every body is a frozen dataclass exposing vectorised ``gauge``/``support`` and
their gradients on arrays of shape ``(..., 2n)``. The Hamiltonian used by the
dual solver is ``H = gauge**2`` and its Legendre transform is
``H* = support**2 / 4``; module-level helpers compute both with gradients.

Where the gauge or support function is not differentiable a fixed
subgradient is returned and the point is reported through a boolean mask
(``with_flag=True``): at the origin (of a factor, for products) the selection
is the minimal-norm subgradient ``0``, which is admissible because the body
contains the origin in its interior; on ties of a product gauge the first
maximising factor is used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .symplectic import CoisoIndex, in_subspace

_ZERO = 1e-300


class BodySpecError(ValueError):
    """Raised for malformed or inadmissible body descriptions."""


def _last_q_axis(n: int) -> np.ndarray:
    e = np.zeros(2 * n)
    e[n - 1] = 1.0
    return e


class ConvexBody:
    """Base class; subclasses implement the ``_gauge``/``_support`` kernels."""

    n: int

    @property
    def dim(self) -> int:
        return 2 * self.n

    def _check(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.dim:
            raise ValueError(f"{type(self).__name__} lives in R^{self.dim}, got shape {z.shape}")
        return z

    def gauge(self, z) -> np.ndarray:
        return self._gauge(self._check(z))

    def support(self, w) -> np.ndarray:
        return self._support(self._check(w))

    def grad_gauge(self, z, with_flag: bool = False):
        z = self._check(z)
        return self._with_selection(z, self._grad_gauge, with_flag)

    def grad_support(self, w, with_flag: bool = False):
        w = self._check(w)
        return self._with_selection(w, self._grad_support, with_flag)

    def _with_selection(self, x, kernel, with_flag):
        origin = np.linalg.norm(x, axis=-1) <= _ZERO
        safe = np.where(origin[..., None], _last_q_axis(self.n), x)
        g, flag = kernel(safe)
        g = np.where(origin[..., None], 0.0, g)
        flag = flag | origin
        return (g, flag) if with_flag else g

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError

    def scaled(self, factor: float) -> "Scaled":
        return Scaled(self, factor)

    def translated(self, shift) -> "Translate":
        return Translate(self, shift)


@dataclass(frozen=True)
class Ball(ConvexBody):
    r: float
    n: int

    def __post_init__(self):
        if not self.r > 0:
            raise BodySpecError(f"ball radius must be positive, got {self.r}")
        if self.n < 1:
            raise BodySpecError(f"ball dimension must be positive, got n={self.n}")

    def _gauge(self, z):
        return np.linalg.norm(z, axis=-1) / self.r

    def _grad_gauge(self, z):
        nz = np.linalg.norm(z, axis=-1, keepdims=True)
        return z / (self.r * nz), np.zeros(z.shape[:-1], dtype=bool)

    def _support(self, w):
        return self.r * np.linalg.norm(w, axis=-1)

    def _grad_support(self, w):
        nw = np.linalg.norm(w, axis=-1, keepdims=True)
        return self.r * w / nw, np.zeros(w.shape[:-1], dtype=bool)

    def to_dict(self):
        return {"type": "ball", "r": self.r, "n": self.n}


@dataclass(frozen=True, eq=False)
class Ellipsoid(ConvexBody):
    """``{z : z^T Q z < 1}``.

    Built from per-plane ``radii`` (``Q = diag(1/r_i^2)`` on both ``q_i`` and
    ``p_i``) or from an explicit symmetric positive definite ``Q``.
    """

    Q: np.ndarray
    radii: tuple[float, ...] | None = None
    Qinv: np.ndarray = field(init=False, repr=False)
    n: int = field(init=False)

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] % 2:
            raise BodySpecError(f"Q must be a square matrix of even size, got {Q.shape}")
        if np.abs(Q - Q.T).max() > 1e-12 * np.abs(Q).max():
            raise BodySpecError("Q must be symmetric")
        if np.linalg.eigvalsh(Q).min() <= 0:
            raise BodySpecError("Q must be positive definite")
        Q.setflags(write=False)
        Qinv = np.linalg.inv(Q)
        Qinv.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "Qinv", Qinv)
        object.__setattr__(self, "n", Q.shape[0] // 2)

    @classmethod
    def from_radii(cls, radii) -> "Ellipsoid":
        radii = tuple(float(r) for r in np.atleast_1d(radii))
        if not radii or min(radii) <= 0:
            raise BodySpecError(f"radii must be positive, got {radii}")
        d = 1.0 / np.square(radii)
        return cls(np.diag(np.concatenate([d, d])), radii)

    def _gauge(self, z):
        return np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", z, self.Q, z), 0.0))

    def _grad_gauge(self, z):
        return (z @ self.Q) / self._gauge(z)[..., None], np.zeros(z.shape[:-1], dtype=bool)

    def _support(self, w):
        return np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", w, self.Qinv, w), 0.0))

    def _grad_support(self, w):
        return (w @ self.Qinv) / self._support(w)[..., None], np.zeros(w.shape[:-1], dtype=bool)

    def to_dict(self):
        if self.radii is not None:
            return {"type": "ellipsoid", "radii": list(self.radii)}
        return {"type": "ellipsoid", "Q": self.Q.tolist()}


@dataclass(frozen=True, eq=False)
class LpBall(ConvexBody):
    """``{z : sum_i |q_i / r_i|^p + |p_i / r_i|^p < 1}`` with ``p >= 2``."""

    p: float
    radii: tuple[float, ...]
    rho: np.ndarray = field(init=False, repr=False)
    n: int = field(init=False)

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p >= 2):
            raise BodySpecError(f"lp_ball needs finite p >= 2, got {self.p}")
        radii = np.atleast_1d(np.asarray(self.radii, dtype=float))
        if radii.size == 0 or radii.min() <= 0:
            raise BodySpecError("lp_ball radii must be positive")
        rho = np.concatenate([radii, radii])
        rho.setflags(write=False)
        object.__setattr__(self, "radii", tuple(radii.tolist()))
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "n", len(radii))

    @property
    def conjugate(self) -> float:
        return self.p / (self.p - 1.0)

    @staticmethod
    def _norm(y, p):
        m = np.max(np.abs(y), axis=-1, keepdims=True)
        m_safe = np.where(m > 0, m, 1.0)
        return (m_safe * np.sum(np.abs(y / m_safe) ** p, axis=-1, keepdims=True) ** (1.0 / p))[..., 0] * (
            m[..., 0] > 0
        )

    @staticmethod
    def _norm_grad(y, p):
        nrm = LpBall._norm(y, p)[..., None]
        return np.sign(y) * (np.abs(y) / nrm) ** (p - 1.0)

    def _gauge(self, z):
        return self._norm(z / self.rho, self.p)

    def _grad_gauge(self, z):
        return self._norm_grad(z / self.rho, self.p) / self.rho, np.zeros(z.shape[:-1], dtype=bool)

    def _support(self, w):
        return self._norm(w * self.rho, self.conjugate)

    def _grad_support(self, w):
        return self._norm_grad(w * self.rho, self.conjugate) * self.rho, np.zeros(w.shape[:-1], dtype=bool)

    def to_dict(self):
        return {"type": "lp_ball", "p": self.p, "radii": list(self.radii)}


@dataclass(frozen=True, eq=False)
class Product(ConvexBody):
    """Cartesian product ``D_1 x ... x D_m``.

    Factor ``i`` owns ``q``- and ``p``-coordinates at the same offset, so
    ``((q1, p1), (q2, p2))`` is identified with ``(q1, q2, p1, p2)``.
    """

    factors: tuple[ConvexBody, ...]
    n: int = field(init=False)
    slots: tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self):
        factors = tuple(self.factors)
        if len(factors) < 1:
            raise BodySpecError("product needs at least one factor")
        n = sum(f.n for f in factors)
        slots, off = [], 0
        for f in factors:
            s = np.concatenate([off + np.arange(f.n), n + off + np.arange(f.n)])
            s.setflags(write=False)
            slots.append(s)
            off += f.n
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "slots", tuple(slots))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.n for f in self.factors)

    def _parts(self, z):
        return [z[..., s] for s in self.slots]

    def _gauge(self, z):
        return np.max([f._gauge(part) for f, part in zip(self.factors, self._parts(z))], axis=0)

    def _grad_gauge(self, z):
        vals = np.stack([f.gauge(part) for f, part in zip(self.factors, self._parts(z))])
        best = np.argmax(vals, axis=0)
        out = np.zeros_like(z)
        for i, (f, part) in enumerate(zip(self.factors, self._parts(z))):
            g = f.grad_gauge(part)
            out[..., self.slots[i]] = np.where((best == i)[..., None], g, 0.0)
        top = np.max(vals, axis=0)
        ties = np.sum(vals >= top - 1e-12 * np.maximum(top, 1.0), axis=0) > 1
        return out, ties

    def _support(self, w):
        return np.sum([f._support(part) for f, part in zip(self.factors, self._parts(w))], axis=0)

    def _grad_support(self, w):
        out = np.zeros_like(w)
        flag = np.zeros(w.shape[:-1], dtype=bool)
        for f, s in zip(self.factors, self.slots):
            g, fl = f.grad_support(w[..., s], with_flag=True)
            out[..., s] = g
            flag |= fl
        return out, flag

    def to_dict(self):
        return {"type": "product", "factors": [f.to_dict() for f in self.factors]}


@dataclass(frozen=True, eq=False)
class Translate(ConvexBody):
    """``base + shift``; the gauge is the Minkowski functional about the origin.

    The support function is valid for any shift. The gauge needs the origin in
    the interior of the translate (``base.gauge(-shift) < 1``).
    """

    base: ConvexBody
    shift: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        shift = np.array(self.shift, dtype=float).reshape(-1)
        if shift.shape != (self.base.dim,):
            raise BodySpecError(f"shift must have length {self.base.dim}, got {shift.shape}")
        shift.setflags(write=False)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "n", self.base.n)

    def _gauge(self, z):
        if not float(self.base.gauge(-self.shift)) < 1.0:
            raise BodySpecError("translate does not contain the origin in its interior")
        # the ray s -> s z - shift leaves the base body exactly once for s > 0
        zero = np.linalg.norm(z, axis=-1) <= _ZERO
        jz = self.base.gauge(np.where(zero[..., None], _last_q_axis(self.n), z))
        hi = (1.0 + float(self.base.gauge(self.shift))) / jz
        lo = np.zeros_like(hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            inside = self.base.gauge(mid[..., None] * z - self.shift) < 1.0
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return np.where(zero, 0.0, 1.0 / (0.5 * (lo + hi)))

    def _grad_gauge(self, z):
        lam = self._gauge(z)[..., None]
        y = z / lam - self.shift
        g, flag = self.base.grad_gauge(y, with_flag=True)
        return g * lam / np.sum(g * z, axis=-1, keepdims=True), flag

    def _support(self, w):
        return self.base.support(w) + w @ self.shift

    def _grad_support(self, w):
        g, flag = self.base.grad_support(w, with_flag=True)
        return g + self.shift, flag

    def to_dict(self):
        return {"type": "translate", "shift": self.shift.tolist(), "base": self.base.to_dict()}


@dataclass(frozen=True, eq=False)
class Scaled(ConvexBody):
    """Dilation ``factor * base`` about the origin."""

    base: ConvexBody
    factor: float
    n: int = field(init=False)

    def __post_init__(self):
        if not self.factor > 0:
            raise BodySpecError(f"scale factor must be positive, got {self.factor}")
        object.__setattr__(self, "n", self.base.n)

    def _gauge(self, z):
        return self.base.gauge(z / self.factor)

    def _grad_gauge(self, z):
        g, flag = self.base.grad_gauge(z / self.factor, with_flag=True)
        return g / self.factor, flag

    def _support(self, w):
        return self.factor * self.base.support(w)

    def _grad_support(self, w):
        g, flag = self.base.grad_support(w, with_flag=True)
        return self.factor * g, flag

    def to_dict(self):
        return {"type": "scaled", "factor": self.factor, "base": self.base.to_dict()}


# -- Hamiltonian and its Legendre transform ---------------------------------


def gauge(body: ConvexBody, z):
    return body.gauge(z)


def support(body: ConvexBody, w):
    return body.support(w)


def hamiltonian(body: ConvexBody, z):
    """``H = gauge**2``, 2-homogeneous with ``{H = 1} = boundary``."""
    return body.gauge(z) ** 2


def grad_hamiltonian(body: ConvexBody, z, with_flag: bool = False):
    g, flag = body.grad_gauge(z, with_flag=True)
    out = 2.0 * body.gauge(z)[..., None] * g
    return (out, flag) if with_flag else out


def legendre_gauge_sq(body: ConvexBody, w):
    """Legendre transform of ``gauge**2``, equal to ``support**2 / 4``."""
    return 0.25 * body.support(w) ** 2


def grad_legendre(body: ConvexBody, w, with_flag: bool = False):
    g, flag = body.grad_support(w, with_flag=True)
    out = 0.5 * body.support(w)[..., None] * g
    return (out, flag) if with_flag else out


@dataclass(frozen=True)
class DualEstimate:
    """Constants with ``|z|^2/R1 <= H(z) <= R1 |z|^2`` and the same for ``H*`` with ``R2``."""

    R1: float
    R2: float
    raw_R1: float
    raw_R2: float


def _directions(dim: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((count, dim))
    axes = np.concatenate([np.eye(dim), -np.eye(dim)])
    u = np.concatenate([axes, u])
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def dual_estimate(body: ConvexBody, count: int = 20000, seed: int = 0, inflate: float = 1.05) -> DualEstimate:
    """Sampled two-sided quadratic bounds for ``H`` and ``H*``, inflated by ``inflate``."""
    u = _directions(body.dim, count, seed)
    h = hamiltonian(body, u)
    hs = legendre_gauge_sq(body, u)
    if not (np.all(np.isfinite(h)) and h.min() > 0 and hs.min() > 0):
        raise BodySpecError("body has empty interior or does not contain the origin")
    r1 = float(max(h.max(), 1.0 / h.min(), 1.0))
    r2 = float(max(hs.max(), 1.0 / hs.min(), 1.0))
    return DualEstimate(inflate * r1, inflate * r2, r1, r2)


def check_origin_interior(body: ConvexBody, count: int = 2000, seed: int = 0) -> float:
    """Smallest sampled value of the support function on unit directions.

    Positive iff (up to sampling) the origin is an interior point.
    """
    u = _directions(body.dim, count, seed)
    return float(body.support(u).min())


# -- JSON --------------------------------------------------------------------


def body_from_dict(d: dict, n: int | None = None) -> ConvexBody:
    """Build a body from its JSON description.

    ``n`` supplies the dimension of balls that do not carry one; ball factors of
    a product default to discs (``n = 1``).
    """
    if not isinstance(d, dict) or "type" not in d:
        raise BodySpecError(f"body description must be an object with a 'type', got {d!r}")
    kind = d["type"]
    try:
        if kind == "ball":
            nn = d.get("n", n)
            if nn is None:
                raise BodySpecError("ball needs a dimension 'n'")
            return Ball(float(d["r"]), int(nn))
        if kind == "ellipsoid":
            if "radii" in d:
                return Ellipsoid.from_radii(d["radii"])
            return Ellipsoid(np.asarray(d["Q"], dtype=float))
        if kind == "lp_ball":
            return LpBall(float(d["p"]), tuple(d["radii"]))
        if kind == "product":
            return Product(tuple(body_from_dict(f, n=1) for f in d["factors"]))
        if kind == "translate":
            return Translate(body_from_dict(d["base"], n=n), d["shift"])
        if kind == "scaled":
            return Scaled(body_from_dict(d["base"], n=n), float(d["factor"]))
    except KeyError as exc:
        raise BodySpecError(f"{kind} body is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, BodySpecError):
            raise
        raise BodySpecError(f"invalid {kind} body: {exc}") from None
    raise BodySpecError(f"unknown body type {kind!r}")


def body_to_dict(body: ConvexBody) -> dict:
    return body.to_dict()


def anchored(body: ConvexBody, idx: CoisoIndex, anchor=None) -> ConvexBody:
    """Move ``anchor`` (a point of the body in R^{n,k}) to the origin.

    Raises :class:`BodySpecError` when the anchor is not in R^{n,k} or the
    resulting body does not contain the origin in its interior.
    """
    if body.n != idx.n:
        raise BodySpecError(f"body lives in R^{body.dim} but the index is (n={idx.n}, k={idx.k})")
    _check_shifts(body, idx)
    if anchor is not None:
        anchor = np.asarray(anchor, dtype=float)
        if not in_subspace(anchor, "Rnk", idx):
            raise BodySpecError("anchor must lie in R^{n,k}")
        if np.any(anchor):
            if isinstance(body, Translate):
                shift = body.shift - anchor
                body = Translate(body.base, shift) if np.any(shift) else body.base
            else:
                body = Translate(body, -anchor)
    if check_origin_interior(body) <= 1e-12:
        raise BodySpecError("the interior of the body does not meet R^{n,k} at the anchor")
    return body


def _check_shifts(body: ConvexBody, idx: CoisoIndex) -> None:
    if isinstance(body, Translate):
        if not in_subspace(body.shift, "Rnk", idx):
            raise BodySpecError("translate shift must lie in R^{n,k}")
        _check_shifts(body.base, idx)
    elif isinstance(body, Scaled):
        _check_shifts(body.base, idx)
