"""Capacities, equilibrium potentials and polar sets."""
from __future__ import annotations

import math

import numpy as np

from .core import QuadForm, form_norm
from .errors import Infeasible, InternalInvariantViolation

POTENTIAL_TOL = 1e-10
POLAR_TOL = 1e-14


def _energy_matrix(q: QuadForm):
    """Coefficients of the squared form norm on the support."""
    return q.coeff + np.diag(q.space.mass[q.idx])


def equilibrium_potential(q: QuadForm, nodes) -> np.ndarray:
    """Minimizer of ``||f||_Q^2`` with ``f = 1`` on ``nodes``, ``f = 0`` off the support.

    For Markovian forms the unit truncation lowers the form norm, so the
    problem with ``f >= 1`` on ``nodes`` has a minimizer equal to one there;
    the equality-constrained problem is a linear solve in the free nodes.
    """
    target = sorted({int(x) for x in nodes})
    if not set(target) <= set(q.support):
        raise Infeasible("target set is not contained in the support")
    f = np.zeros(q.n)
    if not target:
        return f
    f[target] = 1.0
    pos = {x: i for i, x in enumerate(q.support)}
    t = [pos[x] for x in target]
    free = [i for i in range(len(q.support)) if i not in set(t)]
    if free:
        k = _energy_matrix(q)
        rhs = -k[np.ix_(free, t)].sum(axis=1)
        a = k[np.ix_(free, free)]
        try:
            sol = np.linalg.solve(a, rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(a, rhs, rcond=None)[0]
        f[q.idx[free]] = sol
    if f.min() < -POTENTIAL_TOL or f.max() > 1 + POTENTIAL_TOL:
        raise InternalInvariantViolation("equilibrium potential left [0, 1]")
    return f


def capacity(q: QuadForm, nodes) -> float:
    """``inf ||f||_Q^2`` over ``f >= 1`` on ``nodes``; ``inf`` when no such ``f`` exists."""
    try:
        f = equilibrium_potential(q, nodes)
    except Infeasible:
        return math.inf
    return form_norm(q, f)


def is_polar(q: QuadForm, nodes, tol: float = POLAR_TOL) -> bool:
    """Capacity zero.  With positive masses only the empty set is polar."""
    return capacity(q, nodes) <= tol


def capacity_projected_gradient(q: QuadForm, nodes, iters: int = 20000, tol: float = 1e-14) -> float:
    """Inequality-constrained capacity by accelerated projected gradient.

    Independent of the linear-solve route: minimizes ``f K f`` over
    ``f >= 1`` on ``nodes`` directly, with ``f`` free elsewhere on the support.
    """
    target = {int(x) for x in nodes}
    if not target <= set(q.support):
        return math.inf
    if not target:
        return 0.0
    k = _energy_matrix(q)
    mask = np.array([x in target for x in q.support])
    lip = 2 * float(np.linalg.eigvalsh(k)[-1])
    proj = lambda v: np.where(mask, np.maximum(v, 1.0), v)  # noqa: E731
    x = proj(np.ones(len(q.support)))
    y, s = x.copy(), 1.0
    for _ in range(iters):
        x_new = proj(y - 2 * (k @ y) / lip)
        s_new = (1 + math.sqrt(1 + 4 * s * s)) / 2
        y = x_new + (s - 1) / s_new * (x_new - x)
        step = float(np.max(np.abs(x_new - x)))
        x, s = x_new, s_new
        # accelerated iterates are not monotone in value, so stop on the step
        if step <= tol:
            break
    return float(x @ k @ x)
