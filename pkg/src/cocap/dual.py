"""Capacities of convex bodies from the Clarke dual action principle.

For a convex body ``D`` containing the origin, with ``H = gauge**2`` and
Legendre transform ``H*``, the capacity relative to R^{n,k} equals

    min { I(w) / A(w) : A(w) > 0 },    I(w) = int_0^1 H*(-J w'(t)) dt,

over loops ``w`` with leafwise boundary conditions, where ``A`` is the
action. Both functionals are 2-homogeneous, so the ratio needs no
constraint. The minimiser gives the chord ``x = mu * grad H*(-J w')``.

The unknowns are the Fourier coefficients of ``v = -J w'`` (``m pi a_m`` and
``2 m pi b_m``); in these variables ``I`` is well conditioned and ``A`` is a
diagonal quadratic form.
"""

from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody, anchored, gauge, grad_hamiltonian, grad_legendre, legendre_gauge_sq
from .loops import FourierLoop, action as loop_action, evaluate, velocity
from .symplectic import CoisoIndex, apply_J, leaf_residual

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """No restart produced a loop of positive action."""


@dataclass(frozen=True)
class SolverOptions:
    M: int = 24
    starts: int = 16
    max_iters: int = 5000
    grad_tol: float = 1e-7
    seed: int = 0
    nodes: int | None = None  # Gauss-Legendre nodes; default 16 * M
    polish_tol: float = 1e-11
    polish_iters: int = 2000
    memory: int = 12
    workers: int = 1

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.M < 1:
            raise ValueError("M must be >= 1")

    @property
    def n_nodes(self) -> int:
        return self.nodes if self.nodes is not None else 16 * self.M


@dataclass(frozen=True, eq=False)
class CapacityEstimate:
    value: float
    minimizer: FourierLoop
    rayleigh_residual: float
    starts_agreeing: int
    converged: bool
    restart_values: tuple[float, ...] = ()
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "rayleigh_residual": self.rayleigh_residual,
            "starts_agreeing": self.starts_agreeing,
            "converged": self.converged,
            "restart_values": list(self.restart_values),
            "iterations": self.iterations,
            "minimizer": self.minimizer.to_dict(),
        }


class DualProblem:
    """Discretised dual functional on the Fourier coefficients of ``v = -J w'``."""

    def __init__(self, body: ConvexBody, idx: CoisoIndex, M: int, nodes: int | None = None):
        if body.n != idx.n:
            raise ValueError(f"body dimension 2n={body.dim} does not match n={idx.n}")
        self.body = body
        self.idx = idx
        self.M = M
        nodes = nodes if nodes is not None else 16 * M
        x, wts = np.polynomial.legendre.leggauss(nodes)
        self.t = 0.5 * (x + 1.0)
        self.weights = 0.5 * wts

        eye = np.eye(idx.dim)
        cols = []  # (kind, m, slot)
        for m in [*range(-M, 0), *range(1, M + 1)]:
            cols += [("a", m, s) for s in idx.v0_slots]
            cols += [("b", m, s) for s in idx.v1_slots]
        self.columns = cols
        freq = np.array([m if kind == "a" else 2 * m for kind, m, _ in cols], dtype=float)
        vecs = np.array([eye[s] for _, _, s in cols]).reshape(len(cols), idx.dim)
        # A = sum |alpha_m|^2 / (2 pi m) + |beta_m|^2 / (4 pi m)
        self.a_weights = 1.0 / (np.pi * freq * 2.0)
        theta = np.pi * np.outer(self.t, freq)
        basis = np.cos(theta)[:, :, None] * vecs[None] + np.sin(theta)[:, :, None] * apply_J(vecs)[None]
        self.basis = np.ascontiguousarray(basis.transpose(0, 2, 1))  # (nodes, 2n, P)
        self.flat = self.basis.reshape(-1, len(cols))
        self.freq = freq
        self.vecs = vecs

    @property
    def size(self) -> int:
        return len(self.columns)

    def v_at_nodes(self, u: np.ndarray) -> np.ndarray:
        return (self.flat @ u).reshape(len(self.t), self.idx.dim)

    def dual(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        v = self.v_at_nodes(u)
        f = float(self.weights @ legendre_gauge_sq(self.body, v))
        g = grad_legendre(self.body, v) * self.weights[:, None]
        return f, self.flat.T @ g.reshape(-1)

    def action(self, u: np.ndarray) -> float:
        return float(self.a_weights @ (u * u))

    def ratio(self, u: np.ndarray) -> tuple[float, np.ndarray, float]:
        """``(I/A, gradient, A)``; ratio is ``inf`` when ``A <= 0``."""
        a = self.action(u)
        if not a > 0:
            return np.inf, np.zeros_like(u), a
        i, gi = self.dual(u)
        r = i / a
        return r, (gi - r * 2.0 * self.a_weights * u) / a, a

    def residual(self, u: np.ndarray, r: float, g: np.ndarray) -> float:
        """Scale-free gradient norm ``|u| |grad R| / R``."""
        return float(np.linalg.norm(u) * np.linalg.norm(g) / max(abs(r), 1e-300))

    def to_loop(self, u: np.ndarray) -> FourierLoop:
        """Loop ``w`` with ``-J w' = v(u)``, normalised to action 1."""
        M, idx = self.M, self.idx
        a = np.zeros((2 * M + 1, idx.dim))
        b = np.zeros((2 * M + 1, idx.dim))
        for (kind, m, s), c in zip(self.columns, u):
            if kind == "a":
                a[m + M, s] = c / (m * np.pi)
            else:
                b[m + M, s] = c / (2 * m * np.pi)
        loop = FourierLoop(idx, M, a, b)
        return loop * (1.0 / np.sqrt(loop_action(loop)))

    def from_loop(self, loop: FourierLoop) -> np.ndarray:
        u = np.empty(self.size)
        for p, (kind, m, s) in enumerate(self.columns):
            u[p] = loop.a[m + loop.M, s] * m * np.pi if kind == "a" else loop.b[m + loop.M, s] * 2 * m * np.pi
        return u

    def seed_modes(self) -> list[np.ndarray]:
        """Pure lowest modes, one per symplectic plane.

        ``a_1`` along each V0 direction ``q_{k+1}..q_n`` first, then ``b_1``
        along each ``q_1..q_k``. For ellipsoids and products of discs one of
        these is an exact minimiser.
        """
        wanted = [("a", 1, s) for s in self.idx.v0_slots]
        wanted += [("b", 1, s) for s in range(self.idx.k)]
        seeds = []
        for col in wanted:
            u = np.zeros(self.size)
            u[self.columns.index(col)] = 1.0
            seeds.append(u)
        return seeds

    def random_start(self, rng: np.random.Generator) -> np.ndarray:
        # w-coefficients ~ |m|^-2, so v-coefficients ~ |m|^-1
        u = rng.standard_normal(self.size) / np.abs(self.freq)
        for _ in range(60):
            if self.action(u) > 0:
                break
            u = np.where(self.freq < 0, 0.5 * u, u)
        return u / np.linalg.norm(u)


@dataclass
class _Run:
    u: np.ndarray
    value: float
    residual: float
    iterations: int
    converged: bool
    stalled: bool = False


def _lbfgs(
    problem: DualProblem, u0: np.ndarray, tol: float, max_iters: int, memory: int, window: int = 200
) -> _Run:
    """Limited-memory BFGS with backtracking, confined to ``{A > 0}``.

    Once the decrease in ``R`` drops below rounding level the line search
    accepts steps that reduce the gradient norm instead. A run whose value has
    not moved by more than ``1e-15`` (relative) over ``window`` iterations is
    stopped as stalled; this is what happens at the kinks of non-smooth
    bodies.
    """
    u = np.array(u0, dtype=float)
    r, g, _ = problem.ratio(u)
    if not np.isfinite(r):
        raise SolverError("starting loop has non-positive action")
    pairs: deque = deque(maxlen=memory)
    res = problem.residual(u, r, g)
    it = 0
    stalled = False
    trail = deque([r], maxlen=window + 1)
    while it < max_iters and res > tol:
        it += 1
        if len(trail) > window and trail[0] - trail[-1] <= 1e-15 * abs(trail[-1]):
            stalled = True
            break
        q = g.copy()
        alphas = []
        for s, y, rho in reversed(pairs):
            al = rho * (s @ q)
            q -= al * y
            alphas.append(al)
        if pairs:
            s, y, _ = pairs[-1]
            q *= (s @ y) / (y @ y)
        else:
            q *= 0.1 * np.linalg.norm(u) / max(np.linalg.norm(g), 1e-300)
        for (s, y, rho), al in zip(pairs, reversed(alphas)):
            be = rho * (y @ q)
            q += (al - be) * s
        d = -q
        slope = g @ d
        if slope >= 0:
            pairs.clear()
            d = -g * 0.1 * np.linalg.norm(u) / max(np.linalg.norm(g), 1e-300)
            slope = g @ d
        step = 1.0
        gnorm = np.linalg.norm(g)
        while True:
            un = u + step * d
            rn, gn, _ = problem.ratio(un)
            if np.isfinite(rn):
                if rn <= r + 1e-4 * step * slope:
                    break
                if abs(rn - r) <= 64 * np.finfo(float).eps * abs(r) and np.linalg.norm(gn) < gnorm:
                    break
            step *= 0.5
            if step < 1e-16:
                stalled = True
                break
        if stalled:
            break
        s, y = un - u, gn - g
        sy = s @ y
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            pairs.append((s, y, 1.0 / sy))
        u, r, g = un, rn, gn
        nu = np.linalg.norm(u)
        if not 0.5 < nu < 2.0:
            u, g = u / nu, g * nu
            pairs.clear()
        res = problem.residual(u, r, g)
        trail.append(r)
    return _Run(u, r, res, it, res <= tol, stalled)


def minimize_capacity(
    body: ConvexBody,
    idx: CoisoIndex,
    opts: SolverOptions | None = None,
    anchor=None,
) -> CapacityEstimate:
    """Estimate the capacity of ``body`` relative to R^{n,k}.

    ``anchor`` is a point of the body's interior in R^{n,k} moved to the
    origin before solving (the capacity is invariant under such shifts).
    The value is the minimum over restarts of the discretised dual ratio; it
    approaches the capacity from above as ``M`` grows.
    """
    opts = opts or SolverOptions()
    body = anchored(body, idx, anchor)
    problem = DualProblem(body, idx, opts.M, opts.n_nodes)
    seqs = np.random.SeedSequence(opts.seed).spawn(opts.starts)

    seeds = problem.seed_modes()

    def run(i: int) -> _Run | None:
        u0 = seeds[i] if i < len(seeds) else problem.random_start(np.random.default_rng(seqs[i]))
        try:
            return _lbfgs(problem, u0, opts.grad_tol, opts.max_iters, opts.memory)
        except SolverError:
            return None

    if opts.workers > 1:
        with ThreadPoolExecutor(opts.workers) as pool:
            runs = list(pool.map(run, range(opts.starts)))
    else:
        runs = [run(i) for i in range(opts.starts)]
    ok = [r for r in runs if r is not None and np.isfinite(r.value)]
    if not ok:
        raise SolverError("every restart ended in the region of non-positive action")
    best = min(ok, key=lambda r: r.value)  # first minimum in restart order
    polished = _lbfgs(problem, best.u, opts.polish_tol, opts.polish_iters, opts.memory)
    if polished.value <= best.value * (1 + 1e-12):
        final = polished
        final.converged = polished.residual <= opts.grad_tol
    else:
        final = best
    values = tuple(float(r.value) if r is not None else float("nan") for r in runs)
    agree = sum(1 for r in ok if r.value <= final.value * (1 + 1e-5))
    if not final.converged:
        log.warning("dual solver stopped with residual %.3g > %.3g", final.residual, opts.grad_tol)
    return CapacityEstimate(
        value=float(final.value),
        minimizer=problem.to_loop(final.u),
        rayleigh_residual=float(final.residual),
        starts_agreeing=agree,
        converged=bool(final.converged),
        restart_values=values,
        iterations=sum(r.iterations for r in ok) + final.iterations,
    )


def dual_functional(w: FourierLoop, body: ConvexBody, nodes: int | None = None) -> float:
    """``int_0^1 H*(-J w'(t)) dt`` by Gauss-Legendre quadrature."""
    problem = DualProblem(body, w.idx, w.M, nodes)
    return problem.dual(problem.from_loop(w))[0]


def dual_gradient(w: FourierLoop, body: ConvexBody, nodes: int | None = None) -> FourierLoop:
    """Gradient of :func:`dual_functional` with respect to the loop coefficients."""
    problem = DualProblem(body, w.idx, w.M, nodes)
    _, gu = problem.dual(problem.from_loop(w))
    # chain rule through u = c(m) * coefficient
    M, idx = w.M, w.idx
    a = np.zeros((2 * M + 1, idx.dim))
    b = np.zeros((2 * M + 1, idx.dim))
    for (kind, m, s), g in zip(problem.columns, gu):
        if kind == "a":
            a[m + M, s] = g * m * np.pi
        else:
            b[m + M, s] = g * 2 * m * np.pi
    return FourierLoop(idx, M, a, b)


# -- chords --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Chord:
    """Sampled leafwise chord ``x : [0, 1] -> boundary``."""

    t: np.ndarray
    points: np.ndarray
    action: float
    ode_residual: float
    boundary_residual: float
    gauge_residual: float
    certified: bool = False
    capacity: float = float("nan")

    def reversed(self) -> "Chord":
        return Chord(
            self.t,
            self.points[::-1].copy(),
            -self.action,
            self.ode_residual,
            self.boundary_residual,
            self.gauge_residual,
            False,
            self.capacity,
        )

    def summary(self) -> dict:
        return {
            "action": self.action,
            "residuals": {
                "ode": self.ode_residual,
                "boundary": self.boundary_residual,
                "gauge": self.gauge_residual,
            },
            "certified": self.certified,
        }

    def to_dict(self) -> dict:
        return {**self.summary(), "t": self.t.tolist(), "points": self.points.tolist()}

    def to_csv(self) -> str:
        dim = self.points.shape[1]
        n = dim // 2
        header = ["t", *[f"q{i + 1}" for i in range(n)], *[f"p{i + 1}" for i in range(n)]]
        rows = [",".join(header)]
        for t, x in zip(self.t, self.points):
            rows.append(",".join(f"{v:.12g}" for v in (t, *x)))
        return "\n".join(rows) + "\n"


def _chord_map(w: FourierLoop, body: ConvexBody):
    def raw(t):
        return grad_legendre(body, -apply_J(velocity(w, t)))

    return raw


def reconstruct_chord(
    estimate: CapacityEstimate,
    body: ConvexBody,
    idx: CoisoIndex,
    samples: int = 2001,
    anchor=None,
    ode_tol: float = 1e-6,
    boundary_tol: float = 1e-8,
    gauge_tol: float = 1e-6,
    grad_tol: float = 1e-7,
) -> Chord:
    """Chord from the dual minimiser ``w``.

    At a critical point ``grad H*(-J w') = lam * w + xi`` for a scalar ``lam``
    and a constant ``xi``, so the chord is read off ``w`` itself, which
    converges uniformly, rather than off ``w'``, whose truncated series rings
    at the endpoints when the velocity there has a V0 component. ``lam`` and
    ``xi`` are the L^2 least-squares fit over Gauss nodes; ``mu`` then makes
    the mean gauge equal to one. Residuals are the sup over the samples of
    ``|gauge(x) - 1|``, of ``|x' - A J grad H(x)| / max|x'|`` and of the leaf
    relation between the endpoints. The chord is certified when these are
    within tolerance and its action is within ``2 * grad_tol`` of the
    estimate. Points are reported in the anchored frame (the anchor is added
    back when given).
    """
    body = anchored(body, idx, anchor)
    w = estimate.minimizer
    raw = _chord_map(w, body)

    gx, gw = np.polynomial.legendre.leggauss(max(32 * w.M, 256))
    tq = 0.5 * (gx + 1.0)
    dim = idx.dim
    wq = evaluate(w, tq)
    design = np.zeros((tq.size, dim, 1 + dim))
    design[:, :, 0] = wq
    design[:, np.arange(dim), 1 + np.arange(dim)] = 1.0
    sw = np.sqrt(0.5 * gw)[:, None, None]
    coef, *_ = np.linalg.lstsq((sw * design).reshape(-1, 1 + dim), (sw[:, :, 0] * raw(tq)).ravel(), rcond=None)
    lam, xi = coef[0], coef[1:]

    t = np.linspace(0.0, 1.0, samples)
    y = lam * evaluate(w, t) + xi
    mu = 1.0 / np.mean(gauge(body, y))
    x = mu * y
    xdot = mu * lam * velocity(w, t)

    xq = mu * (lam * wq + xi)
    xq_dot = mu * lam * velocity(w, tq)
    act = float(0.25 * gw @ np.sum(-apply_J(xq_dot) * xq, axis=1))

    field_ = act * apply_J(grad_hamiltonian(body, x))
    ode = float(np.linalg.norm(xdot - field_, axis=1).max() / np.linalg.norm(xdot, axis=1).max())
    bnd = leaf_residual(x[0], x[-1], idx)
    gres = float(np.abs(gauge(body, x) - 1.0).max())

    certified = (
        act > 0
        and ode <= ode_tol
        and bnd <= boundary_tol
        and gres <= gauge_tol
        and abs(act - estimate.value) <= 2 * grad_tol
    )
    if anchor is not None:
        x = x + np.asarray(anchor, dtype=float)
    return Chord(t, x, act, ode, bnd, gres, bool(certified), estimate.value)


@dataclass(frozen=True)
class ChordReport:
    clauses: dict
    measurements: dict

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())


def verify_chord(
    chord: Chord,
    body: ConvexBody,
    idx: CoisoIndex,
    angle_tol: float = 1e-3,
    boundary_tol: float = 1e-8,
    gauge_tol: float = 1e-6,
    anchor=None,
) -> ChordReport:
    """Re-check the leafwise chord conditions from the samples alone.

    Velocities come from second-order finite differences of the samples and
    normals from ``grad H``; nothing from the solver is reused.
    """
    body = anchored(body, idx, anchor)
    x = chord.points - (np.asarray(anchor, dtype=float) if anchor is not None else 0.0)
    t = chord.t
    xdot = np.gradient(x, t, axis=0, edge_order=2)
    field_ = apply_J(grad_hamiltonian(body, x))
    cosang = np.sum(xdot * field_, axis=1) / (
        np.linalg.norm(xdot, axis=1) * np.linalg.norm(field_, axis=1)
    )
    line_angle = np.arccos(np.clip(np.abs(cosang), 0.0, 1.0))
    integrand = 0.5 * np.sum(-apply_J(xdot) * x, axis=1)
    act = float(np.sum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(t)))
    gres = float(np.abs(gauge(body, x) - 1.0).max())
    bnd = leaf_residual(x[0], x[-1], idx)
    clauses = {
        "on_boundary": gres <= gauge_tol,
        "characteristic_direction": float(line_angle.max()) <= angle_tol,
        "orientation": act > 0 and bool(np.all(cosang > 0)),
        "leafwise_endpoints": bnd <= boundary_tol,
    }
    measurements = {
        "gauge_residual": gres,
        "max_angle": float(line_angle.max()),
        "action": act,
        "boundary_residual": bnd,
    }
    return ChordReport(clauses, measurements)
