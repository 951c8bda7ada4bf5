"""Independent reference computations shared by the test modules."""

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

from cocap.loops import evaluate, velocity
from cocap.symplectic import apply_J


def brute_legendre(body, w, samples=20000, seed=0):
    """``sup_z <z, w> - H(z)`` from the gauge alone.

    Along the ray through a boundary point ``u`` the sup is
    ``max(<u, w>, 0)^2 / 4``, so only the best boundary point is needed. Rays
    through random directions give a start, then Nelder-Mead maximises the
    scale-free ratio ``<x, w> / gauge(x)``.
    """
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((samples, body.dim))
    u = d / body.gauge(d)[:, None]
    a = u @ w
    x, best = u[np.argmax(a)], float(a.max())

    def neg(y):
        g = float(body.gauge(y))
        return -float(y @ w) / g if g > 0 else 0.0

    # restarting Nelder-Mead from its own result gets it past kinks
    for _ in range(10):
        res = minimize(neg, x, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if -res.fun <= best + 1e-14:
            break
        x, best = res.x / float(body.gauge(res.x)), -res.fun
    return max(best, 0.0) ** 2 / 4


def central_gradient(f, x, h=1e-5):
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def quadrature_action(loop, nodes=1024):
    """``1/2 int_0^1 <-J x', x> dt`` by Gauss-Legendre on [0, 1]."""
    x, wts = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1)
    integrand = 0.5 * np.sum(-apply_J(velocity(loop, t)) * evaluate(loop, t), axis=1)
    return float(0.5 * wts @ integrand)


def adaptive_action(loop):
    val, _ = quad(lambda t: 0.5 * float(-apply_J(velocity(loop, t)) @ evaluate(loop, t)), 0, 1, limit=500, epsabs=1e-13)
    return val
