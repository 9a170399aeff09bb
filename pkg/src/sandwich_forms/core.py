"""Finite measure spaces, quadratic forms on node functions, Markov checks.

A form lives on a :class:`MeasureSpace` and has a domain given by a node
support: the domain is ``{f : f = 0 off support}``.  In finite dimension the
closed order ideals of node functions are exactly of this shape, so order
ideal questions reduce to set inclusion.

Besides its coefficient block a form may carry ``edges``: the jump weights of
the graph it was assembled from, including edges that leave the support.  The
coefficient block alone cannot tell an edge to a node outside the support from
killing at its endpoint; ``edges`` keeps that distinction and is what lets a
Dirichlet-type form remember its Neumann-type extension.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainViolation, NotMarkovian, InternalInvariantViolation

ZERO_TOL = 1e-12
SAMPLE_TOL = 1e-10


def scaled_tol(arr, tol=ZERO_TOL):
    """Absolute tolerance ``tol * max(1, max|arr|)``."""
    arr = np.asarray(arr, dtype=float)
    scale = float(np.max(np.abs(arr))) if arr.size else 0.0
    return tol * max(1.0, scale)


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Finite node set with weights ``mass`` and a designated boundary.

    Nodes are addressed by integer index; ``names`` are labels for I/O.
    Interior nodes need positive mass.  Boundary nodes may have zero mass,
    which mimics a boundary that is invisible to the L2 structure; such
    nodes cannot sit in the support of a form whose semigroup is requested.
    """

    mass: np.ndarray
    names: tuple = ()
    boundary: frozenset = frozenset()

    def __post_init__(self):
        mass = _frozen(self.mass)
        if mass.ndim != 1 or mass.size == 0:
            raise ValueError("mass must be a nonempty 1-d array")
        object.__setattr__(self, "mass", mass)
        names = tuple(str(s) for s in self.names) or tuple(str(i) for i in range(mass.size))
        if len(names) != mass.size or len(set(names)) != len(names):
            raise ValueError("names must be unique and match the number of nodes")
        object.__setattr__(self, "names", names)
        boundary = frozenset(int(x) for x in self.boundary)
        if any(x < 0 or x >= mass.size for x in boundary):
            raise ValueError("boundary must be a subset of the nodes")
        object.__setattr__(self, "boundary", boundary)
        if not np.all(np.isfinite(mass)):
            raise ValueError("masses must be finite")
        interior = np.array([i not in boundary for i in range(mass.size)])
        if np.any(mass[interior] <= 0) or np.any(mass < 0):
            raise ValueError("interior masses must be positive, boundary masses nonnegative")

    @classmethod
    def uniform(cls, n, boundary=()):
        return cls(np.ones(n), boundary=frozenset(boundary))

    @property
    def n(self):
        return self.mass.size

    @property
    def nodes(self):
        return tuple(range(self.n))

    @property
    def interior(self):
        return tuple(i for i in range(self.n) if i not in self.boundary)

    def index(self, name):
        return self.names.index(str(name))

    def indicator(self, nodes):
        out = np.zeros(self.n)
        out[list(nodes)] = 1.0
        return out

    def __eq__(self, other):
        if not isinstance(other, MeasureSpace):
            return NotImplemented
        return (self.names == other.names and self.boundary == other.boundary
                and np.array_equal(self.mass, other.mass))

    def __hash__(self):
        return hash((self.names, self.boundary, self.mass.tobytes()))


def _normalize_support(support, n):
    support = tuple(sorted({int(x) for x in support}))
    if any(x < 0 or x >= n for x in support):
        raise ValueError("support must be a subset of the nodes")
    return support


@dataclass(frozen=True, eq=False)
class QuadForm:
    """Symmetric bilinear form ``Q(f, g) = sum coeff[i, j] f(s_i) g(s_j)``.

    ``coeff`` is indexed by ``support x support``.  ``edges`` (optional,
    ``n x n``) records ambient jump weights; when given, its restriction to
    the support must reproduce the off-diagonal of ``coeff`` and the implied
    killing must be nonnegative.  ``signed=True`` skips the positive
    semidefiniteness check, which is only useful for probing the
    positivity/locality tests with indefinite forms.
    """

    space: MeasureSpace
    support: tuple
    coeff: np.ndarray
    edges: np.ndarray | None = None
    signed: bool = False

    def __post_init__(self):
        support = _normalize_support(self.support, self.space.n)
        object.__setattr__(self, "support", support)
        coeff = _frozen(self.coeff)
        k = len(support)
        if coeff.shape != (k, k):
            raise ValueError(f"coeff must have shape {(k, k)}, got {coeff.shape}")
        if not np.all(np.isfinite(coeff)):
            raise ValueError("coeff must be finite")
        if np.max(np.abs(coeff - coeff.T), initial=0.0) > scaled_tol(coeff):
            raise ValueError("coeff is not symmetric")
        coeff = _frozen((coeff + coeff.T) / 2)
        object.__setattr__(self, "coeff", coeff)
        if not self.signed and k:
            eig = np.linalg.eigvalsh(coeff)
            if eig[0] < -1e-10 * max(1.0, float(np.max(np.abs(eig)))):
                raise ValueError(f"coeff is not positive semidefinite (min eigenvalue {eig[0]:.3e})")
        if self.edges is not None:
            b = _frozen(self.edges)
            n = self.space.n
            tol = scaled_tol(b)
            if b.shape != (n, n) or np.any(b < 0) or np.any(np.diag(b) != 0):
                raise ValueError("edges must be an n x n nonnegative array with zero diagonal")
            if np.max(np.abs(b - b.T)) > tol:
                raise ValueError("edges must be symmetric")
            b = _frozen((b + b.T) / 2)
            idx = np.array(support, dtype=int)
            off = coeff - np.diag(np.diag(coeff))
            sub = b[np.ix_(idx, idx)]
            if np.max(np.abs(off + sub), initial=0.0) > max(tol, scaled_tol(coeff)):
                raise ValueError("edges disagree with the off-diagonal of coeff")
            kill = np.diag(coeff) - b[idx].sum(axis=1)
            if np.any(kill < -max(tol, scaled_tol(coeff))):
                raise ValueError("edges imply negative killing")
            object.__setattr__(self, "edges", b)

    @property
    def n(self):
        return self.space.n

    @property
    def idx(self):
        return np.array(self.support, dtype=int)

    def full(self):
        """Coefficients zero-padded to ``n x n``."""
        out = np.zeros((self.n, self.n))
        idx = self.idx
        out[np.ix_(idx, idx)] = self.coeff
        return out

    def __call__(self, f, g=None):
        return evaluate(self, f, f if g is None else g)


@dataclass(frozen=True, eq=False)
class GraphForm:
    """Beurling-Deny data: edge weights ``b``, killing ``c`` and a support."""

    space: MeasureSpace
    b: np.ndarray
    c: np.ndarray
    support: tuple = None

    def __post_init__(self):
        n = self.space.n
        b = _frozen(self.b)
        c = _frozen(self.c)
        if b.shape != (n, n) or c.shape != (n,):
            raise ValueError("b must be n x n and c length n")
        if np.any(b < 0) or np.any(np.diag(b) != 0) or np.max(np.abs(b - b.T)) > scaled_tol(b):
            raise ValueError("b must be symmetric, nonnegative, with zero diagonal")
        if np.any(c < 0):
            raise ValueError("killing weights must be nonnegative")
        object.__setattr__(self, "b", _frozen((b + b.T) / 2))
        object.__setattr__(self, "c", c)
        support = self.space.nodes if self.support is None else self.support
        object.__setattr__(self, "support", _normalize_support(support, n))


def laplacian(b):
    """Graph Laplacian ``diag(b 1) - b``."""
    b = np.asarray(b, dtype=float)
    return np.diag(b.sum(axis=1)) - b


def form_from_graph(g: GraphForm) -> QuadForm:
    idx = np.array(g.support, dtype=int)
    full = laplacian(g.b) + np.diag(g.c)
    return QuadForm(g.space, g.support, full[np.ix_(idx, idx)], edges=g.b)


def edge_weights(q: QuadForm) -> np.ndarray:
    """Ambient jump weights of ``q``; inferred from ``coeff`` when absent."""
    if q.edges is not None:
        return np.array(q.edges)
    b = np.zeros((q.n, q.n))
    idx = q.idx
    b[np.ix_(idx, idx)] = -(q.coeff - np.diag(np.diag(q.coeff)))
    return np.maximum(b, 0.0)


def _structurally_markovian(q):
    c = q.coeff
    tol = scaled_tol(c)
    off = c - np.diag(np.diag(c))
    return bool(np.all(off <= tol) and np.all(c.sum(axis=1) >= -tol))


def killing_weights(q: QuadForm) -> np.ndarray:
    """Killing ``c(x) = coeff[x, x] - sum_y b(x, y)`` on the support, zero elsewhere."""
    if not _structurally_markovian(q):
        raise NotMarkovian("form has positive off-diagonal entries or negative row sums")
    b = edge_weights(q)
    c = np.zeros(q.n)
    idx = q.idx
    c[idx] = np.diag(q.coeff) - b[idx].sum(axis=1)
    c[np.abs(c) <= scaled_tol(q.coeff)] = 0.0
    return c


def graph_from_form(q: QuadForm) -> GraphForm:
    """Inverse of :func:`form_from_graph` for Markovian forms."""
    b = edge_weights(q)
    c = killing_weights(q)
    if np.any(c < 0):
        raise NotMarkovian("negative killing")
    return GraphForm(q.space, b, c, q.support)


def as_vec(q_or_space, f, name="f"):
    n = q_or_space.n
    f = np.asarray(f, dtype=float)
    if f.shape != (n,):
        raise ValueError(f"{name} must have length {n}")
    return f


def _check_domain(q, f, name):
    f = as_vec(q, f, name)
    mask = np.ones(q.n, dtype=bool)
    mask[q.idx] = False
    if np.any(np.abs(f[mask]) > ZERO_TOL):
        bad = int(np.flatnonzero(mask & (np.abs(f) > ZERO_TOL))[0])
        raise DomainViolation(f"{name} does not vanish at node {q.space.names[bad]} outside the support")
    return f


def evaluate(q: QuadForm, f, g) -> float:
    f = _check_domain(q, f, "f")
    g = _check_domain(q, g, "g")
    idx = q.idx
    return float(f[idx] @ q.coeff @ g[idx])


def form_norm(q: QuadForm, f) -> float:
    """Squared form norm ``Q(f) + sum_x m(x) f(x)**2``."""
    f = _check_domain(q, f, "f")
    return evaluate(q, f, f) + float(np.sum(q.space.mass * f * f))


def is_markovian(q: QuadForm, samples: int = 100, seed: int = 0) -> bool:
    """Finite-dimensional Markov criterion, guarded by random unit contractions.

    The structural test (nonpositive off-diagonal, nonnegative row sums) is
    authoritative.  Sampling checks ``Q(f+ ^ 1) <= Q(f)``; a sampled
    violation on a structurally Markovian form raises
    :class:`InternalInvariantViolation`.
    """
    verdict = _structurally_markovian(q)
    if not verdict or not q.support:
        return verdict
    rng = np.random.default_rng(seed)
    idx = q.idx
    for _ in range(samples):
        f = np.zeros(q.n)
        f[idx] = rng.normal(scale=2.0, size=idx.size)
        qf = evaluate(q, f, f)
        g = np.clip(f, 0.0, 1.0)
        qg = evaluate(q, g, g)
        if qg > qf + SAMPLE_TOL * max(1.0, abs(qf)):
            raise InternalInvariantViolation(f"unit contraction raised energy: {qg} > {qf}")
    return verdict


def subform_coeff(q: QuadForm, nodes: Sequence[int]) -> np.ndarray:
    """Padded coefficients of ``q`` on ``nodes x nodes``."""
    idx = np.array(sorted(nodes), dtype=int)
    return q.full()[np.ix_(idx, idx)]


def diagonal_form(space: MeasureSpace, weights, support: Iterable[int] | None = None, signed=False):
    """Multiplication form ``sum_x w(x) f(x)**2`` on ``support``."""
    support = space.nodes if support is None else _normalize_support(support, space.n)
    w = np.asarray(weights, dtype=float)
    if w.shape == (space.n,):
        w = w[np.array(support, dtype=int)]
    return QuadForm(space, support, np.diag(w), signed=signed)


def same_form(a: QuadForm, b: QuadForm, tol: float = 0.0) -> bool:
    """Equality of forms: same space, same support, coefficients within ``tol``."""
    if a.space != b.space or a.support != b.support:
        return False
    return bool(np.max(np.abs(a.coeff - b.coeff), initial=0.0) <= tol)
