"""Desk-scale models: paths, intervals, squares and fractional kernels.

Grids on ``[0, 1]`` use step ``h = 1/(n+1)`` and nodes ``x_0 .. x_{n+1}``.
Interior nodes carry mass ``h``; the two end nodes form the boundary and
carry ``boundary_mass`` (default ``h/2``, the trapezoid weight).  Jumps
between neighbours have weight ``1/h``.  A potential ``V`` enters as killing
``V(x) m(x)``.

Dirichlet forms are supported on the interior but keep their ambient edges,
so their active main part is the Neumann form.  Robin forms are Neumann
forms plus boundary weights ``beta``, built as restricted forms.
"""
from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from .core import GraphForm, MeasureSpace, QuadForm, form_from_graph
from .errors import BadDimension, BadExponent, NegativeRobin
from .sandwich import AdmissiblePair, restricted_form

KINDS = ("dirichlet", "neumann", "robin")


def path_graph(n, edge_weight=1.0, masses=None, killing=None, boundary=()) -> GraphForm:
    """``P_n`` with uniform edge weight, masses (default 1) and killing (default 0)."""
    if n < 1:
        raise BadDimension("a path needs at least one node")
    b = np.zeros((n, n))
    i = np.arange(n - 1)
    b[i, i + 1] = b[i + 1, i] = edge_weight
    mass = np.ones(n) if masses is None else np.asarray(masses, dtype=float)
    c = np.zeros(n) if killing is None else np.asarray(killing, dtype=float)
    return GraphForm(MeasureSpace(mass, boundary=frozenset(boundary)), b, c)


def _kind(kind):
    kind = str(kind).lower()
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


def _potential(V, n_nodes):
    if V is None:
        return np.zeros(n_nodes)
    if np.isscalar(V):
        v = np.full(n_nodes, float(V))
    else:
        v = np.asarray(V, dtype=float)
    if v.shape != (n_nodes,) or np.any(v < 0):
        raise ValueError("V must be nonnegative, one value per node")
    return v


def _interval_data(n, boundary_mass):
    h = 1.0 / (n + 1)
    mass = np.full(n + 2, h)
    mass[[0, -1]] = h / 2 if boundary_mass is None else boundary_mass
    return h, mass


def _path_weights(k, w):
    b = np.zeros((k, k))
    i = np.arange(k - 1)
    b[i, i + 1] = b[i + 1, i] = w
    return b


def interval_laplacian(n, kind="dirichlet", V=None, boundary_mass=None, beta=(0.0, 0.0),
                       robin_scale="absolute") -> QuadForm:
    """Finite-difference ``int |f'|^2 + int V f^2`` on ``[0, 1]``.

    ``beta`` (Robin only) is a scalar or a ``(left, right)`` pair.  With
    ``robin_scale="h"`` the weights are multiplied by ``h``; the default
    uses them as given.  ``V`` is a scalar or a vector over the ``n + 2``
    nodes.
    """
    if n < 2:
        raise BadDimension("the interval model needs n >= 2 interior nodes")
    kind = _kind(kind)
    h, mass = _interval_data(n, boundary_mass)
    names = tuple(f"x{k}" for k in range(n + 2))
    space = MeasureSpace(mass, names, frozenset({0, n + 1}))
    b = _path_weights(n + 2, 1.0 / h)
    c = _potential(V, n + 2) * mass
    support = range(1, n + 1) if kind == "dirichlet" else range(n + 2)
    q = form_from_graph(GraphForm(space, b, c, support))
    if kind != "robin":
        return q
    left, right = (beta, beta) if np.isscalar(beta) else beta
    mu = np.zeros(n + 2)
    mu[[0, -1]] = left, right
    if np.any(mu < 0):
        raise NegativeRobin("Robin weights must be nonnegative")
    if robin_scale == "h":
        mu = mu * h
    elif robin_scale != "absolute":
        raise ValueError("robin_scale must be 'absolute' or 'h'")
    return restricted_form(q, AdmissiblePair(frozenset(space.nodes), mu))


def fractional_form(n, s, kind="dirichlet", boundary_mass=None) -> QuadForm:
    """Jump energy with ``b(x_i, x_j) = h**2 / |x_i - x_j|**(1 + 2s)``.

    Every pair of grid nodes is joined; ``kind`` is ``"dirichlet"``
    (interior support) or ``"neumann"`` (all nodes).
    """
    if n < 2:
        raise BadDimension("the fractional model needs n >= 2 interior nodes")
    if not 0 < s < 1:
        raise BadExponent("s must lie strictly between 0 and 1")
    kind = _kind(kind)
    if kind == "robin":
        raise ValueError("fractional forms come in Dirichlet and Neumann kinds only")
    h, mass = _interval_data(n, boundary_mass)
    x = np.arange(n + 2) * h
    dist = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(dist, 1.0)
    b = h * h / dist ** (1 + 2 * s)
    np.fill_diagonal(b, 0.0)
    names = tuple(f"x{k}" for k in range(n + 2))
    space = MeasureSpace(mass, names, frozenset({0, n + 1}))
    support = range(1, n + 1) if kind == "dirichlet" else range(n + 2)
    return form_from_graph(GraphForm(space, b, np.zeros(n + 2), support))


def grid_index(i, j, ny):
    return i * (ny + 2) + j


def grid2d_laplacian(nx, ny, kind="dirichlet", beta=0.0, clamped=(), V=None, boundary_mass=None,
                     robin_scale="absolute") -> QuadForm:
    """Tensorized grid on the unit square: ``K_x (x) M_y + M_x (x) K_y``.

    Node ``(i, j)`` has index ``i * (ny + 2) + j`` and name ``"i_j"``; the
    perimeter is the boundary.  ``beta`` (Robin) is a scalar or a mapping
    from perimeter nodes (index or name) to weights; ``clamped`` lists
    perimeter nodes removed from the support, which mixes Dirichlet
    conditions into any kind.  With ``robin_scale="h"`` each weight is
    multiplied by the boundary length its node represents.
    """
    if nx < 1 or ny < 1:
        raise BadDimension("the grid needs at least one interior node per direction")
    kind = _kind(kind)
    hx, mx = _interval_data(nx, None)
    hy, my = _interval_data(ny, None)
    kx = np.diag(_path_weights(nx + 2, 1 / hx).sum(axis=1)) - _path_weights(nx + 2, 1 / hx)
    ky = np.diag(_path_weights(ny + 2, 1 / hy).sum(axis=1)) - _path_weights(ny + 2, 1 / hy)
    lap = np.kron(kx, np.diag(my)) + np.kron(np.diag(mx), ky)
    b = -(lap - np.diag(np.diag(lap)))
    mass = np.kron(mx, my)
    perimeter = [grid_index(i, j, ny) for i in range(nx + 2) for j in range(ny + 2)
                 if i in (0, nx + 1) or j in (0, ny + 1)]
    if boundary_mass is not None:
        mass[perimeter] = boundary_mass
    names = tuple(f"{i}_{j}" for i in range(nx + 2) for j in range(ny + 2))
    space = MeasureSpace(mass, names, frozenset(perimeter))
    c = _potential(V, space.n) * mass
    clamp = {space.index(x) if isinstance(x, str) else int(x) for x in clamped}
    if not clamp <= set(perimeter):
        raise ValueError("only perimeter nodes can be clamped")
    support = space.interior if kind == "dirichlet" else tuple(x for x in space.nodes if x not in clamp)
    q = form_from_graph(GraphForm(space, b, c, support))
    if kind != "robin":
        return q
    mu = np.zeros(space.n)
    if isinstance(beta, Mapping):
        for x, w in beta.items():
            k = space.index(x) if isinstance(x, str) else int(x)
            if k not in space.boundary:
                raise ValueError("Robin weights live on perimeter nodes")
            mu[k] = w
    else:
        mu[perimeter] = float(beta)
    if np.any(mu < 0):
        raise NegativeRobin("Robin weights must be nonnegative")
    if robin_scale == "h":
        mu = mu * _arc_length(nx, ny, hx, hy)
    elif robin_scale != "absolute":
        raise ValueError("robin_scale must be 'absolute' or 'h'")
    mu[list(clamp)] = 0.0
    return restricted_form(q, AdmissiblePair(frozenset(q.support), mu))


def _arc_length(nx, ny, hx, hy):
    out = np.zeros((nx + 2, ny + 2))
    out[[0, -1], :] = hy
    out[:, [0, -1]] = hx
    for i in (0, -1):
        for j in (0, -1):
            out[i, j] = (hx + hy) / 2
    return out.ravel()
