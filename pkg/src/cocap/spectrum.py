"""Chord-action spectra with closed-form or semi-analytic oracles.

Three families are covered: ellipsoids, where the linear flow gives planar
chords in closed form; star-shaped planar curves with ``k = 0``, where the
action of an arc is the area it cuts off against the q-axis; and a smoothed
W-shaped planar domain that is unbounded in the limit.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import BPoly
from scipy.optimize import brentq

from .bodies import ConvexBody
from .symplectic import CoisoIndex, leaf_residual


class CurveError(ValueError):
    """Curve violates a precondition (tangential crossing, bad parameters)."""


@dataclass(frozen=True, order=True)
class SpectrumEntry:
    action: float
    label: str = field(compare=False)
    multiplicity: int = field(default=1, compare=False)


@dataclass(frozen=True)
class Spectrum:
    """Sorted positive chord actions with provenance labels."""

    entries: tuple[SpectrumEntry, ...]

    def __post_init__(self):
        entries = tuple(sorted(self.entries))
        if any(not e.action > 0 for e in entries):
            raise ValueError("spectrum actions must be positive")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.action for e in self.entries])

    def min(self) -> float:
        if not self.entries:
            raise ValueError("empty spectrum")
        return self.entries[0].action

    def to_list(self) -> list[dict]:
        return [{"action": e.action, "label": e.label} for e in self.entries]

    def to_json(self, digits: int = 12) -> str:
        return json.dumps([{"action": float(f"{e.action:.{digits}g}"), "label": e.label} for e in self.entries])

    def to_csv(self, digits: int = 12) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["action", "label"])
        for e in self.entries:
            w.writerow([f"{e.action:.{digits}g}", e.label])
        return buf.getvalue()


# ---------------------------------------------------------------- ellipsoids


def _check_radii(radii, idx: CoisoIndex) -> np.ndarray:
    r = np.asarray(radii, dtype=float).ravel()
    if r.size != idx.n:
        raise ValueError(f"expected {idx.n} radii, got {r.size}")
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise ValueError("radii must be positive and finite")
    return r


def _plane_unit(r: float, i: int, k: int) -> float:
    # planes 1..k need a full turn, the others a half turn
    return np.pi * r**2 if i < k else np.pi * r**2 / 2


def ellipsoid_spectrum(radii, idx: CoisoIndex, bound: float) -> Spectrum:
    """Planar leafwise-chord actions of the ellipsoid up to ``bound``.

    Plane ``i`` contributes ``m pi r_i^2`` when ``i <= k`` and
    ``m pi r_i^2 / 2`` otherwise. Non-planar chords of resonant ellipsoids are
    not listed; the minimum is always planar.
    """
    r = _check_radii(radii, idx)
    if not bound > 0:
        raise ValueError(f"bound must be positive, got {bound}")
    entries = []
    for i, ri in enumerate(r):
        unit = _plane_unit(ri, i, idx.k)
        turn = "full" if i < idx.k else "half"
        for m in range(1, int(np.floor(bound / unit * (1 + 1e-12))) + 1):
            entries.append(SpectrumEntry(float(m * unit), f"plane {i + 1}, {m} {turn} turn{'s' if m > 1 else ''}"))
    return Spectrum(tuple(entries))


def ellipsoid_min_action(radii, idx: CoisoIndex) -> float:
    r = _check_radii(radii, idx)
    return float(min(_plane_unit(ri, i, idx.k) for i, ri in enumerate(r)))


def shoot_ellipsoid_actions(radii, idx: CoisoIndex, bound: float, tol: float = 1e-6) -> list[tuple[int, float, float]]:
    """Independent oracle: integrate ``z' = J grad H`` and record leafwise returns.

    Each plane is started at ``q_i = r_i`` on the unit level of ``H = j^2``;
    there the action of a flow segment equals its duration. Every crossing of
    ``p_i = 0`` is tested against the leaf relation. Returns
    ``(plane, time, residual)`` for each passing return up to ``bound``.
    """
    r = _check_radii(radii, idx)
    n = idx.n
    inv = 1.0 / np.concatenate([r, r]) ** 2

    def rhs(_t, z):
        g = 2.0 * inv * z
        return np.concatenate([g[n:], -g[:n]])

    found = []
    for i in range(n):
        z0 = np.zeros(2 * n)
        z0[i] = r[i]

        def hit(_t, z, i=i):
            return z[n + i]

        sol = solve_ivp(rhs, (0.0, bound * (1 + 1e-9)), z0, events=hit, rtol=1e-12, atol=1e-13, method="DOP853")
        for t, z in zip(sol.t_events[0], sol.y_events[0]):
            if t <= 1e-9:
                continue
            res = leaf_residual(z, z0, idx)
            if res <= tol:
                found.append((i, float(t), res))
    return found


# ---------------------------------------------------------------- planar curves


@dataclass(frozen=True)
class Segment:
    """Smooth piece ``s -> point(s)`` on ``[0, 1]`` with tangent ``tangent(s)``.

    ``samples`` sets the density used to locate axis crossings; straight lines
    carry ``exact`` endpoints so their action is computed in closed form.
    """

    point: Callable[[np.ndarray], np.ndarray]
    tangent: Callable[[np.ndarray], np.ndarray]
    samples: int = 2001
    exact: tuple | None = None

    @classmethod
    def line(cls, a, b) -> "Segment":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        d = b - a
        return cls(
            lambda s: a + np.multiply.outer(np.asarray(s, float), d),
            lambda s: np.broadcast_to(d, np.shape(s) + (2,)).copy(),
            samples=2,
            exact=(a, b),
        )

    @classmethod
    def graph(cls, f, df, x0: float, x1: float, samples: int = 2001) -> "Segment":
        """The graph ``p = f(q)`` for ``q`` running from ``x0`` to ``x1``."""
        dx = x1 - x0

        def point(s):
            x = x0 + np.asarray(s, float) * dx
            return np.stack([x, f(x)], axis=-1)

        def tangent(s):
            x = x0 + np.asarray(s, float) * dx
            return np.stack([np.full_like(x, dx), df(x) * dx], axis=-1)

        return cls(point, tangent, samples)

    @classmethod
    def polar(cls, radius, th0: float, th1: float, samples: int = 4001) -> "Segment":
        """``radius(theta) (cos theta, sin theta)`` for theta from ``th0`` to ``th1``.

        The radial derivative is taken by central differences; it cancels
        from the action integrand.
        """
        dth = th1 - th0
        h = 1e-6

        def point(s):
            th = th0 + np.asarray(s, float) * dth
            return radius(th)[..., None] * np.stack([np.cos(th), np.sin(th)], axis=-1)

        def tangent(s):
            th = th0 + np.asarray(s, float) * dth
            rr = radius(th)
            dr = (radius(th + h) - radius(th - h)) / (2 * h)
            c, sn = np.cos(th), np.sin(th)
            return dth * np.stack([dr * c - rr * sn, dr * sn + rr * c], axis=-1)

        return cls(point, tangent, samples)

    def action(self, s0: float, s1: float) -> float:
        """``1/2 int (q dp - p dq)`` over ``[s0, s1]``."""
        if self.exact is not None:
            a, b = self.exact
            u = a + s0 * (b - a)
            v = a + s1 * (b - a)
            return 0.5 * float(u[0] * v[1] - u[1] * v[0])

        def integrand(s):
            z = self.point(s)
            dz = self.tangent(s)
            return 0.5 * float(z[0] * dz[1] - z[1] * dz[0])

        val, _ = quad(integrand, s0, s1, limit=400, epsabs=1e-13, epsrel=1e-12)
        return val


@dataclass(frozen=True)
class PlanarCurve:
    """Closed counter-clockwise curve in the ``(q, p)`` plane built from segments.

    Stretches of the curve lying on the q-axis must be whole segments.
    """

    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise CurveError("a curve needs at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))
        ends = [(s.point(np.array(1.0)), t.point(np.array(0.0))) for s, t in zip(self.segments, self.segments[1:] + self.segments[:1])]
        gap = max(float(np.abs(a - b).max()) for a, b in ends)
        if gap > 1e-9:
            raise CurveError(f"segments do not join up (gap {gap:.3g})")
        if self.area() <= 0:
            raise CurveError("curve must be counter-clockwise about the origin")

    @classmethod
    def from_samples(cls, points) -> "PlanarCurve":
        """Closed polyline through ``points`` (the last point joins the first)."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise CurveError("need at least three (q, p) points")
        if np.allclose(pts[0], pts[-1]):
            pts = pts[:-1]
        return cls(tuple(Segment.line(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))))

    def sample(self, per_segment: int | None = None) -> np.ndarray:
        out = []
        for seg in self.segments:
            m = per_segment or seg.samples
            out.append(seg.point(np.linspace(0.0, 1.0, m))[:-1])
        return np.concatenate(out)

    def area(self) -> float:
        return float(sum(seg.action(0.0, 1.0) for seg in self.segments))

    def reparameterized(self, phi: Callable, dphi: Callable) -> "PlanarCurve":
        """Same curve with every segment precomposed by ``phi: [0,1] -> [0,1]``."""
        segs = []
        for seg in self.segments:
            segs.append(
                Segment(
                    lambda s, seg=seg: seg.point(phi(np.asarray(s, float))),
                    lambda s, seg=seg: seg.tangent(phi(np.asarray(s, float))) * np.asarray(dphi(np.asarray(s, float)))[..., None],
                    seg.samples,
                )
            )
        return PlanarCurve(tuple(segs))

    def to_csv(self, per_segment: int = 200) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "p"])
        for q, p in self.sample(per_segment):
            w.writerow([f"{q:.12g}", f"{p:.12g}"])
        return buf.getvalue()


def is_star_shaped(curve: PlanarCurve, angles: int = 360, per_segment: int | None = None) -> bool:
    """Ray test: every ray from the origin at ``angles`` equally spaced angles meets the curve once.

    Radial stretches of the boundary count as a single meeting, so the polar
    angle along the curve only has to be non-decreasing with total turn 2 pi.
    """
    pts = curve.sample(per_segment)
    if np.any(np.hypot(pts[:, 0], pts[:, 1]) < 1e-12):
        return False
    th = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
    th = np.append(th, th[0] + 2 * np.pi)
    step = np.diff(th)
    if np.any(step < -1e-12) or abs(th[-1] - th[0] - 2 * np.pi) > 1e-9:
        return False
    for a in 2 * np.pi * np.arange(angles) / angles:
        levels = a + 2 * np.pi * np.arange(np.floor((th[0] - a) / (2 * np.pi)), np.ceil((th[-1] - a) / (2 * np.pi)) + 1)
        hits = sum(int(np.sum((th[:-1] < L) & (L <= th[1:]))) for L in levels)
        if hits != 1:
            return False
    return True


def _crossings(curve: PlanarCurve, tol: float) -> tuple[list[float], set[int]]:
    """Global parameters of q-axis crossings, and the indices of on-axis segments."""
    segs = curve.segments
    nseg = len(segs)
    axis = set()
    for i, seg in enumerate(segs):
        p = seg.point(np.linspace(0.0, 1.0, max(seg.samples, 2)))[:, 1]
        if np.all(np.abs(p) <= tol):
            axis.add(i)
    cross = []
    for i, seg in enumerate(segs):
        if i in axis:
            continue
        s = np.linspace(0.0, 1.0, max(seg.samples, 2))
        p = seg.point(s)[:, 1]
        near = np.abs(p) <= tol
        last = len(s) - 1
        j = 0
        while j <= last:
            if not near[j]:
                j += 1
                continue
            run_end = j
            while run_end < last and near[run_end + 1]:
                run_end += 1
            if j == 0 or run_end == last:
                # the run reaches a segment end: the end is the crossing
                cross.append(i + (0.0 if j == 0 else 1.0))
                if j == 0 and run_end == last:
                    raise CurveError("segment lies on the q-axis only at sample points")
            elif p[j - 1] * p[run_end + 1] >= 0:
                q = seg.point(np.array(s[j]))[0]
                raise CurveError(f"tangential touch of the q-axis at q = {q:.6g}")
            else:
                cross.append(i + 0.5 * (s[j] + s[run_end]))
            j = run_end + 1
        for j in np.flatnonzero((p[:-1] * p[1:] < 0) & ~near[:-1] & ~near[1:]):
            sj = brentq(lambda x: float(seg.point(np.array(x))[1]), s[j], s[j + 1], xtol=1e-15)
            cross.append(i + sj)
    # fold segment ends onto [0, nseg) and merge duplicates
    cross = sorted({round(c % nseg, 12) for c in cross})
    for c in cross:
        i = int(np.floor(c)) % nseg
        s = c - np.floor(c)
        if s < 1e-12:
            if i in axis or (i - 1) % nseg in axis:
                continue
            sides = ((segs[i], 0.0), (segs[(i - 1) % nseg], 1.0))
        else:
            sides = ((segs[i], s),)
        # isolated crossing: p must move off the axis with nonzero speed
        for seg, ss in sides:
            dz = seg.tangent(np.array(ss))
            if abs(dz[1]) <= 1e-6 * max(1e-300, float(np.hypot(*dz))):
                q = seg.point(np.array(ss))[0]
                raise CurveError(f"tangential crossing of the q-axis at q = {q:.6g}")
    return cross, axis


def planar_chord_actions(curve: PlanarCurve, bound: float = np.inf, tol: float = 1e-10) -> Spectrum:
    """Actions of the leafwise chords of a planar curve for ``k = 0``.

    The boundary arcs between consecutive q-axis crossings are the chords.
    Run clockwise (the characteristic direction) and closed by the q-axis
    segment between their ends, each encloses a signed area equal to its
    action; the closing segment carries no action. On-axis stretches are
    skipped. Positive actions up to ``bound`` are returned.
    """
    segs = curve.segments
    nseg = len(segs)
    cross, axis = _crossings(curve, tol)
    breaks = set(cross)
    for i in axis:
        breaks.update({float(i), float((i + 1) % nseg)})
    breaks = sorted(breaks)
    if len(breaks) < 2:
        raise CurveError("curve meets the q-axis fewer than twice")
    entries = []
    for a, b in zip(breaks, breaks[1:] + [breaks[0] + nseg]):
        i0 = int(np.floor(a))
        if i0 % nseg in axis and b - a <= 1 + 1e-12 and np.floor(b - 1e-12) == i0:
            continue
        total = 0.0
        t = a
        while t < b - 1e-12:
            i = int(np.floor(t + 1e-13))
            end = min(b, i + 1.0)
            if i % nseg not in axis:
                total += segs[i % nseg].action(t - i, end - i)
            t = end
        q0 = float(segs[i0 % nseg].point(np.array(a - i0))[0])
        ib = int(np.floor(b - 1e-12))
        q1 = float(segs[ib % nseg].point(np.array(b - ib))[0])
        if total > 0 and total <= bound:
            side = "upper" if _arc_side(segs, a, b, nseg) > 0 else "lower"
            entries.append(SpectrumEntry(total, f"{side} arc from q={q0:.6g} to q={q1:.6g}"))
    return Spectrum(tuple(entries))


def _arc_side(segs, a: float, b: float, nseg: int) -> float:
    mid = 0.5 * (a + b)
    i = int(np.floor(mid))
    return float(segs[i % nseg].point(np.array(mid - i))[1])


def circle_curve(r: float = 1.0) -> PlanarCurve:
    if not r > 0:
        raise CurveError(f"radius must be positive, got {r}")
    return PlanarCurve(
        (
            Segment(
                lambda s: r * np.stack([np.cos(2 * np.pi * np.asarray(s, float)), np.sin(2 * np.pi * np.asarray(s, float))], axis=-1),
                lambda s: 2 * np.pi * r * np.stack([-np.sin(2 * np.pi * np.asarray(s, float)), np.cos(2 * np.pi * np.asarray(s, float))], axis=-1),
            ),
        )
    )


def curve_from_body(body: ConvexBody) -> PlanarCurve:
    """Boundary of a planar body (``n = 1``) as a polar curve ``1 / j(theta)``."""
    if body.dim != 2:
        raise CurveError(f"planar curves need a body in R^2, got dimension {body.dim}")

    def radius(th):
        th = np.asarray(th, float)
        return 1.0 / body.gauge(np.stack([np.cos(th), np.sin(th)], axis=-1))

    return PlanarCurve((Segment.polar(radius, 0.0, np.pi), Segment.polar(radius, np.pi, 2 * np.pi)))


# ---------------------------------------------------------------- W-domain


@dataclass(frozen=True)
class WDomain:
    """Smoothed, truncated W-domain: the curve plus its closed-form areas."""

    N: float
    eps: float
    delta1: float
    delta2: float
    curve: PlanarCurve
    cap_area: float
    notch_area: float

    @property
    def area_g(self) -> float:
        """Area of the smoothed domain before the corners are rounded."""
        return 2 * self.N**2 + self.cap_area

    @property
    def area(self) -> float:
        return self.area_g - 4 * self.notch_area

    @property
    def area_unsmoothed(self) -> float:
        return 2 * self.N**2 + np.pi / 2

    @property
    def expected_actions(self) -> tuple[float, float]:
        """Cap chord ``Area(W_g) - 2 N^2`` and lower chord ``2 N^2 - 4 Area(notch)``."""
        return self.area_g - 2 * self.N**2, 2 * self.N**2 - 4 * self.notch_area


def _cap_blend(delta1: float, delta2: float) -> BPoly:
    t0 = 1.0 - delta1
    s = np.sqrt(1 - t0**2)
    d1 = -t0 / s
    d2 = -1.0 / s**3
    return BPoly.from_derivatives([t0, 1.0 + delta2], [[s, d1, d2], [0.0, 0.0, 0.0]])


def w_domain_curve(N: float, eps: float, delta1: float | None = None, delta2: float | None = None) -> WDomain:
    """Boundary of the smoothed W-domain in the ``(q, p)`` plane.

    The upper boundary is the cap ``p = g(q)``: the unit circle on
    ``|q| <= 1 - delta1``, a quintic Hermite blend down to zero at
    ``|q| = 1 + delta2``, then the q-axis out to the sides ``q = +-N``. The
    box is closed by ``p = -N``. Its four corners are rounded by notches
    under ``h(t) = (eps/2) (1 - 2t/eps)^2``, each of area ``eps^2 / 12``.

    By default ``delta1 = min(1e-3, eps/10)`` and ``delta2 = 2 delta1``;
    with equal deltas the quintic blend dips below the circle.
    """
    if not N > 2:
        raise CurveError(f"N must exceed 2, got {N}")
    # the endpoint 0.01 itself is admitted
    if not 0 < eps <= 0.01:
        raise CurveError(f"eps must lie in (0, 1/100], got {eps}")
    delta1 = min(1e-3, eps / 10) if delta1 is None else float(delta1)
    delta2 = 2 * delta1 if delta2 is None else float(delta2)
    if not (0 < delta1 < 0.5 and 0 < delta2 < 0.5):
        raise CurveError("delta1 and delta2 must lie in (0, 1/2)")
    if 1 + delta2 >= N - eps / 2:
        raise CurveError("cap overlaps the rounded corners")

    blend = _cap_blend(delta1, delta2)
    dblend = blend.derivative()
    t0, t1 = 1.0 - delta1, 1.0 + delta2

    # condition (iii): strictly decreasing and above the circle up to t = 1
    tt = np.linspace(t0, t1, 4001)[1:-1]
    if np.any(dblend(tt) >= 0):
        raise CurveError("cap blend is not strictly decreasing; widen delta2")
    ti = tt[tt <= 1.0]
    if np.any(blend(ti) < np.sqrt(1 - ti**2) - 1e-15):
        raise CurveError("cap blend dips below the unit circle; widen delta2 relative to delta1")

    circle_part = 0.5 * (t0 * np.sqrt(1 - t0**2) + np.arcsin(t0))
    ab = blend.antiderivative()
    cap_area = 2 * (circle_part + float(ab(t1) - ab(t0)))
    if not 0 < cap_area - np.pi / 2 < eps / 2:
        raise CurveError(f"cap surplus {cap_area - np.pi / 2:.3g} outside (0, eps/2); shrink delta1, delta2")

    e2 = eps / 2

    def h(t):
        return e2 * (1 - np.asarray(t) / e2) ** 2

    def dh(t):
        return -2 * (1 - np.asarray(t) / e2)

    notch_area = e2 * e2 / 3

    def g_right(x):
        return blend(x)

    def g_left(x):
        return blend(-x)

    segs = (
        Segment.graph(g_right, dblend, t1, t0),
        Segment.graph(lambda x: np.sqrt(1 - x**2), lambda x: -x / np.sqrt(1 - x**2), t0, -t0),
        Segment.graph(g_left, lambda x: -dblend(-x), -t0, -t1),
        Segment.line((-t1, 0.0), (-N + e2, 0.0)),
        # corner at (-N, 0): boundary (-N + s, -h(s))
        Segment.graph(lambda x: -h(x + N), lambda x: -dh(x + N), -N + e2, -N),
        Segment.line((-N, -e2), (-N, -N + e2)),
        # corner at (-N, -N): (-N + s, -N + h(s)), traversed as p decreases
        Segment.graph(lambda x: -N + h(x + N), lambda x: dh(x + N), -N, -N + e2),
        Segment.line((-N + e2, -N), (N - e2, -N)),
        # corner at (N, -N): (N - s, -N + h(s))
        Segment.graph(lambda x: -N + h(N - x), lambda x: -dh(N - x), N - e2, N),
        Segment.line((N, -N + e2), (N, -e2)),
        # corner at (N, 0): (N - s, -h(s))
        Segment.graph(lambda x: -h(N - x), lambda x: dh(N - x), N, N - e2),
        Segment.line((N - e2, 0.0), (t1, 0.0)),
    )
    return WDomain(float(N), float(eps), delta1, delta2, PlanarCurve(segs), float(cap_area), float(notch_area))
