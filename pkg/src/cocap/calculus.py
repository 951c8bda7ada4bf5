"""Closed-form capacity algebra and an axiom harness around the solver.

The product rule takes the minimum of factor capacities, each evaluated at
an effective index determined by a simple recursion on the leading index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma
from typing import Callable, Sequence

import numpy as np

from .bodies import Ball, ConvexBody, Ellipsoid, LpBall, Product, Scaled, Translate
from .dual import SolverOptions, minimize_capacity
from .spectrum import ellipsoid_min_action
from .symplectic import CoisoIndex, in_subspace

Evaluator = Callable[..., float]


def product_index_chain(l0: int, dims: Sequence[int]) -> list[int]:
    """``l_0, ..., l_{m-1}`` with ``l_j = max(l_{j-1} - n_j, 0)``."""
    dims = [int(d) for d in dims]
    if not dims or min(dims) < 1:
        raise ValueError(f"factor dimensions must be positive, got {dims}")
    if not 0 <= l0 <= sum(dims):
        raise ValueError(f"l0 must lie in [0, {sum(dims)}], got {l0}")
    chain = [int(l0)]
    for d in dims[:-1]:
        chain.append(max(chain[-1] - d, 0))
    return chain


def effective_indices(l0: int, dims: Sequence[int]) -> list[int]:
    """Per-factor indices ``k_i = min(n_i, l_{i-1})``."""
    return [min(d, l) for d, l in zip(dims, product_index_chain(l0, dims))]


def product_capacity(factors: Sequence[tuple[int, Callable[[int], float]]], l0: int) -> float:
    """Minimum over factors of the factor capacity at its effective index.

    ``factors`` holds ``(n_i, evaluator)`` pairs where ``evaluator(k_i)`` returns
    the capacity of factor ``i`` for R^{n_i, k_i}. The same value serves the
    product of the factor boundaries.
    """
    dims = [d for d, _ in factors]
    ks = effective_indices(l0, dims)
    return float(min(ev(k) for (_, ev), k in zip(factors, ks)))


def disc_capacity(r: float, kk: int) -> float:
    """``pi r^2`` for ``kk = 1`` and ``pi r^2 / 2`` for ``kk = 0``."""
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    if kk not in (0, 1):
        raise ValueError(f"disc index must be 0 or 1, got {kk}")
    return float(np.pi * r * r * (1.0 if kk else 0.5))


@dataclass(frozen=True)
class NonTrivialityConstants:
    ball: float
    w_domain: float
    u_domain: float


def nontriviality_constants(idx: CoisoIndex) -> NonTrivialityConstants:
    """Reference values for the unit ball and the W- and U-domains (all ``pi/2``)."""
    if idx.k == idx.n:
        raise ValueError("the constants are only pi/2 for k < n")
    return NonTrivialityConstants(np.pi / 2, np.pi / 2, np.pi / 2)


def _lp_disc_area(p: float, r: float) -> float:
    return 4 * r * r * gamma(1 + 1 / p) ** 2 / gamma(1 + 2 / p)


def closed_form_capacity(body: ConvexBody, idx: CoisoIndex) -> float | None:
    """Exact capacity when the body is built from known pieces, else ``None``.

    Known pieces are balls, axis-aligned ellipsoids, planar l^p discs, and
    products, dilations and R^{n,k}-translates of known bodies.
    """
    if body.n != idx.n:
        raise ValueError(f"body dimension {body.dim} does not match n={idx.n}")
    if isinstance(body, Ball):
        return ellipsoid_min_action([body.r] * body.n, idx)
    if isinstance(body, Ellipsoid):
        return None if body.radii is None else ellipsoid_min_action(body.radii, idx)
    if isinstance(body, LpBall):
        if body.n != 1:
            return None
        area = _lp_disc_area(body.p, body.radii[0])
        # symmetric in p -> -p, so both arcs cut off half the area
        return area if idx.k == 1 else area / 2
    if isinstance(body, Scaled):
        base = closed_form_capacity(body.base, idx)
        return None if base is None else body.factor**2 * base
    if isinstance(body, Translate):
        if not in_subspace(body.shift, "Rnk", idx):
            return None
        return closed_form_capacity(body.base, idx)
    if isinstance(body, Product):
        vals = {}
        ks = effective_indices(idx.k, body.dims)
        for i, (f, kk) in enumerate(zip(body.factors, ks)):
            v = closed_form_capacity(f, CoisoIndex(f.n, kk))
            if v is None:
                return None
            vals[i] = v
        return product_capacity([(f.n, lambda _k, i=i: vals[i]) for i, f in enumerate(body.factors)], idx.k)
    return None


# ---------------------------------------------------------------- axiom harness


@dataclass
class AxiomCheck:
    name: str
    value: float | None
    target: str
    violation: float | None
    passed: bool
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "target": self.target,
            "violation": self.violation,
            "passed": self.passed,
            "error": self.error,
        }


@dataclass
class AxiomReport:
    checks: list[AxiomCheck] = field(default_factory=list)
    capacities: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def table(self) -> str:
        rows = [f"{'axiom':<16}{'value':>16}  {'target':<22}{'violation':>12}  status"]
        for c in self.checks:
            val = "-" if c.value is None else f"{c.value:.12g}"
            vio = "-" if c.violation is None else f"{c.violation:.3g}"
            status = "pass" if c.passed else f"FAIL{': ' + c.error if c.error else ''}"
            rows.append(f"{c.name:<16}{val:>16}  {c.target:<22}{vio:>12}  {status}")
        return "\n".join(rows)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "capacities": self.capacities,
        }


def solver_evaluator(opts: SolverOptions | None = None) -> Evaluator:
    def evaluate(body: ConvexBody, idx: CoisoIndex, anchor=None) -> float:
        return minimize_capacity(body, idx, opts, anchor=anchor).value

    return evaluate


def axiom_harness(
    body: ConvexBody,
    idx: CoisoIndex,
    opts: SolverOptions | None = None,
    evaluate: Evaluator | None = None,
    lam: float = 2.0,
    nest: float = 1.1,
    slack: float = 0.01,
) -> AxiomReport:
    """Evaluate the capacity on the body and derived bodies and score the axioms.

    Checks conformality (``c(lam D) = lam^2 c(D)``), invariance under a
    translation along ``q_1`` (anchored half way so the origin stays inside),
    monotonicity against ``D / nest`` and ``nest D``, and, for products with a
    closed form, the product rule. ``evaluate(body, idx, anchor=None)``
    defaults to the dual solver; failures are recorded and the harness goes on.
    """
    evaluate = evaluate or solver_evaluator(opts)
    report = AxiomReport()
    cache: dict[str, float | Exception] = {}

    def cap(key: str, b: ConvexBody, anchor=None):
        if key not in cache:
            try:
                cache[key] = float(evaluate(b, idx, anchor=anchor))
                report.capacities[key] = cache[key]
            except Exception as exc:  # reported per case
                cache[key] = exc
        return cache[key]

    def record(name, keys, target, compute):
        vals = [cache[k] for k in keys]
        bad = next((v for v in vals if isinstance(v, Exception)), None)
        if bad is not None:
            report.checks.append(AxiomCheck(name, None, target, None, False, f"{type(bad).__name__}: {bad}"))
            return
        value, violation = compute(*vals)
        report.checks.append(AxiomCheck(name, value, target, violation, violation <= slack))

    base = cap("base", body)
    cap("scaled", Scaled(body, lam))
    record(
        "conformality",
        ["base", "scaled"],
        f"ratio {lam**2:.6g} +- {slack:.0%}",
        lambda a, b: (b / a, abs(b / a / lam**2 - 1.0)),
    )

    shift = np.zeros(idx.dim)
    shift[0] = 1.0
    cap("translated", Translate(body, shift), anchor=0.5 * shift)
    record(
        "translation",
        ["base", "translated"],
        f"ratio 1 +- {slack:.0%}",
        lambda a, b: (b / a, abs(b / a - 1.0)),
    )

    cap("inner", Scaled(body, 1.0 / nest))
    cap("outer", Scaled(body, nest))
    record(
        "monotonicity",
        ["inner", "base", "outer"],
        f"non-decreasing, {slack:.0%} slack",
        lambda a, b, c: (c - a, max(0.0, (a - b) / b, (b - c) / b)),
    )

    if isinstance(body, Product) and not isinstance(base, Exception):
        exact = closed_form_capacity(body, idx)
        if exact is not None:
            report.capacities["product_formula"] = exact
            cache["exact"] = exact
            record(
                "product_formula",
                ["base", "exact"],
                f"closed form +- {slack:.0%}",
                lambda a, b: (a / b, abs(a / b - 1.0)),
            )
    return report


def monotonicity_margin(inner: ConvexBody, outer: ConvexBody, idx: CoisoIndex, evaluate: Evaluator | None = None) -> float:
    """Relative margin ``(c(outer) - c(inner)) / c(inner)``; negative means a violation."""
    evaluate = evaluate or solver_evaluator()
    a = evaluate(inner, idx)
    b = evaluate(outer, idx)
    return (b - a) / a
