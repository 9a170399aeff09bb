"""Forms sandwiched between a Dirichlet form and its active main part.

A sandwiched form is parametrized by an admissible pair ``(O, mu)``: a node
set ``O`` and node weights ``mu >= 0`` on it.  The associated form is the
main part restricted to functions supported in ``O`` plus ``sum_O mu f**2``.

Two regimes are handled.  Without killing, ``Q'`` is sandwiched iff its
domain sits inside the main part's domain, ``Q' - Q^(M)`` is a measure form,
and ``Q'`` extends ``Q``; the measure then lives off the support of ``Q``.
With killing ``k``, the extension clause becomes ``mu <= k`` on the support
of ``Q``.

The clauses imply two-sided semigroup domination, but here the converse can
fail: boundary nodes carry mass, and weakening a jump that touches the
boundary keeps ``Q <= Q' <= Q^(M)`` while ``Q' - Q^(M)`` stops being local.
The verdict follows the clauses; ``verdict.domination`` reports the
semigroup side on its own.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .capacity import POLAR_TOL, capacity
from .core import QuadForm, ZERO_TOL, scaled_tol
from .decomposition import active_main_part, killing_part
from .domination import DEFAULT_TIMES, dominates_semigroup
from .errors import NotAdmissible, NotSandwiched, TooLarge
from .measure_rep import is_local, is_positive

MAX_ENUMERATION_NODES = 12


@dataclass(frozen=True, eq=False)
class AdmissiblePair:
    """Node set ``O`` and weights ``mu`` (length ``n``, zero off ``O``)."""

    O: frozenset
    mu: np.ndarray

    def __post_init__(self):
        O = frozenset(int(x) for x in self.O)
        mu = np.array(self.mu, dtype=float)
        if mu.ndim != 1:
            raise ValueError("mu must be a vector over the nodes")
        if np.any(~np.isfinite(mu)) or np.any(mu < 0):
            raise NotAdmissible("mu must be finite and nonnegative")
        outside = np.ones(mu.size, dtype=bool)
        outside[list(O)] = False
        if np.any(mu[outside] != 0):
            raise NotAdmissible("mu must vanish off O")
        mu.setflags(write=False)
        object.__setattr__(self, "O", O)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "_hash", hash((O, mu.tobytes())))

    @classmethod
    def of(cls, n, O, mu=None):
        """Build from a node iterable and an optional ``{node: weight}`` mapping."""
        vec = np.zeros(n)
        for x, w in (mu or {}).items():
            vec[int(x)] = w
        return cls(frozenset(O), vec)

    def __eq__(self, other):
        if not isinstance(other, AdmissiblePair):
            return NotImplemented
        return self.O == other.O and np.array_equal(self.mu, other.mu)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        mu = {x: float(self.mu[x]) for x in sorted(self.O) if self.mu[x]}
        return f"AdmissiblePair(O={sorted(self.O)}, mu={mu})"


@dataclass(frozen=True)
class SandwichVerdict:
    """Clause-by-clause verdict.

    ``witness`` is ``(clause, x, y)`` for the first failing clause, where
    clause is ``"a"`` (order ideal), ``"b"`` (positive and local) or ``"c"``
    (extension, or the killing bound in killing mode).  ``domination`` holds
    the semigroup cross-check ``Q <= Q' <= Q^(M)`` when it was run.
    """

    is_sandwiched: bool
    order_ideal_ok: bool
    positive_ok: bool
    local_ok: bool
    extension_ok: bool
    witness: tuple | None = None
    mode: str = "boundary"
    domination: bool | None = None

    @property
    def failing_clause(self):
        return None if self.witness is None else self.witness[0]


@functools.lru_cache(maxsize=4096)
def _cached_capacity(q, nodes):
    return capacity(q, nodes)


def check_admissible(qm: QuadForm, pair: AdmissiblePair):
    """Raise :class:`NotAdmissible` unless ``mu`` fits ``qm`` and charges no polar node."""
    _check_admissible(qm, pair)


@functools.lru_cache(maxsize=1 << 16)
def _check_admissible(qm, pair):
    if pair.mu.size != qm.n:
        raise NotAdmissible("mu has the wrong length")
    for x in np.flatnonzero(pair.mu > 0):
        if _cached_capacity(qm, frozenset({int(x)})) <= POLAR_TOL:
            raise NotAdmissible(f"mu charges the polar node {qm.space.names[x]}")


def restricted_form(qm: QuadForm, pair: AdmissiblePair) -> QuadForm:
    """``Q_{O,mu}``: ``qm`` on functions supported in ``O``, plus ``sum mu f**2``."""
    check_admissible(qm, pair)
    support = sorted(pair.O & set(qm.support))
    full = qm.full() + np.diag(pair.mu)
    idx = np.array(support, dtype=int)
    return QuadForm(qm.space, support, full[np.ix_(idx, idx)], edges=qm.edges)


def pair_dominates(p1: AdmissiblePair, p2: AdmissiblePair, qm: QuadForm) -> bool:
    """``Q_{O1,mu1} <= Q_{O2,mu2}`` via ``cap(O1 - O2) = 0`` and ``mu2 <= mu1`` on ``O1 & O2``."""
    check_admissible(qm, p1)
    check_admissible(qm, p2)
    supp = set(qm.support)
    o1, o2 = p1.O & supp, p2.O & supp
    if _cached_capacity(qm, frozenset(o1 - o2)) > 0:
        return False
    common = sorted(o1 & o2)
    tol = ZERO_TOL * max(1.0, float(p1.mu.max(initial=0.0)), float(p2.mu.max(initial=0.0)))
    return bool(np.all(p2.mu[common] <= p1.mu[common] + tol))


def _difference(qm, qprime):
    idx = qprime.idx
    return qprime.coeff - qm.full()[np.ix_(idx, idx)]


def _cross_check(q, qprime, qm, times, tol):
    if qprime.space != q.space:
        return False
    lower = dominates_semigroup(q, qprime, times, tol).semigroup_verdict
    return bool(lower and dominates_semigroup(qprime, qm, times, tol).semigroup_verdict)


def _verdict(q, qprime, qm, kill, mode, cross_check, times, tol):
    witness = None
    order_ok = set(qprime.support) <= set(qm.support)
    if not order_ok:
        x = min(set(qprime.support) - set(qm.support))
        witness = ("a", x, x)
        pos_ok = local_ok = False
        ext_ok = False
    else:
        d = _difference(qm, qprime)
        tol_d = max(scaled_tol(qprime.coeff), scaled_tol(qm.coeff))
        dq = QuadForm(q.space, qprime.support, d, signed=True)
        pos_ok = is_positive(dq, tol_d)
        local_ok = is_local(dq, tol_d)
        if not (pos_ok and local_ok):
            off = np.abs(d - np.diag(np.diag(d))) > tol_d
            bad = np.argwhere(off | (d < -tol_d))
            i, j = bad[0]
            witness = ("b", int(qprime.idx[i]), int(qprime.idx[j]))
        inner = set(q.support)
        ext_ok = inner <= set(qprime.support)
        if not ext_ok and witness is None:
            x = min(inner - set(qprime.support))
            witness = ("c", x, x)
        if ext_ok:
            pos = {x: i for i, x in enumerate(qprime.support)}
            sub = [pos[x] for x in q.support]
            block = d[np.ix_(sub, sub)]
            if mode == "boundary":
                bad = np.argwhere(np.abs(block) > tol_d)
            else:
                # d restricted to supp(Q) is diag(mu); the band needs 0 <= mu <= killing
                bound = kill[q.idx]
                off = np.abs(block - np.diag(np.diag(block))) > tol_d
                excess = np.diag(np.diag(block) - bound)
                bad = np.argwhere(off | (excess > tol_d))
            if bad.size:
                ext_ok = False
                if witness is None:
                    i, j = bad[0]
                    witness = ("c", int(q.idx[i]), int(q.idx[j]))
    ok = order_ok and pos_ok and local_ok and ext_ok
    dom = _cross_check(q, qprime, qm, times, tol) if cross_check else None
    return SandwichVerdict(ok, order_ok, pos_ok, local_ok, ext_ok, witness, mode, dom)


def _killing_vector(q):
    kq = killing_part(q)
    kill = np.zeros(q.n)
    kill[q.idx] = np.diag(kq.coeff)
    return kill


def sandwich_check(q: QuadForm, qprime: QuadForm, cross_check: bool = True,
                   times=DEFAULT_TIMES, tol: float = ZERO_TOL) -> SandwichVerdict:
    """Form-level test of ``Q <= Q' <= Q^(M)``.

    Uses the boundary regime when ``Q`` has no killing and falls back to
    :func:`killing_mode_check` otherwise.  With ``cross_check`` the
    semigroup inequalities are evaluated too and stored in
    ``verdict.domination``.
    """
    kill = _killing_vector(q)
    if np.any(kill > 0):
        return killing_mode_check(q, qprime, cross_check, times, tol)[0]
    qm = active_main_part(q)
    return _verdict(q, qprime, qm, kill, "boundary", cross_check, times, tol)


def killing_mode_check(q: QuadForm, qprime: QuadForm, cross_check: bool = True,
                       times=DEFAULT_TIMES, tol: float = ZERO_TOL):
    """Sandwich test against ``Q^(M)`` when ``Q`` may have killing.

    Returns ``(verdict, mu)`` where ``mu`` is the measure of ``Q' - Q^(M)``
    (``None`` if it is not a measure form).  The extension clause is
    replaced by ``mu <= k`` on the support of ``Q``, ``k`` the killing.
    """
    qm = active_main_part(q)
    kill = _killing_vector(q)
    verdict = _verdict(q, qprime, qm, kill, "killing", cross_check, times, tol)
    mu = None
    if verdict.order_ideal_ok and verdict.positive_ok and verdict.local_ok:
        mu = np.zeros(q.n)
        mu[qprime.idx] = np.diag(_difference(qm, qprime))
    return verdict, mu


def recover_pair(q: QuadForm, qprime: QuadForm) -> AdmissiblePair:
    """The pair ``(O, mu)`` with ``Q' = (Q^(M))_{O,mu}``.

    ``O`` is the support of ``Q'`` and ``mu`` the diagonal of ``Q' - Q^(M)``.
    Raises :class:`NotSandwiched` when the form-level check fails.
    """
    verdict = sandwich_check(q, qprime, cross_check=False)
    if not verdict.is_sandwiched:
        raise NotSandwiched(f"clause ({verdict.failing_clause}) fails at {verdict.witness[1:]}")
    qm = active_main_part(q)
    mu = np.zeros(q.n)
    mu[qprime.idx] = np.maximum(np.diag(_difference(qm, qprime)), 0.0)
    return AdmissiblePair(frozenset(qprime.support), mu)


def enumerate_sandwiched(q: QuadForm, mu_grid=(), killing_grid=None):
    """All pairs ``(O, mu)`` on a grid of measure levels, with their forms.

    ``O`` ranges over sets between the support of ``Q`` and the support of
    ``Q^(M)``.  Nodes outside the support of ``Q`` take weights from
    ``mu_grid`` (zero is always included).  Nodes inside carry zero weight
    without killing; with killing they take ``{0, k/2, k}`` per node unless
    ``killing_grid`` (fractions of ``k``) says otherwise.
    """
    if q.n > MAX_ENUMERATION_NODES:
        raise TooLarge(f"enumeration is limited to {MAX_ENUMERATION_NODES} nodes")
    qm = active_main_part(q)
    kill = _killing_vector(q)
    inner = list(q.support)
    extra = [x for x in qm.support if x not in set(q.support)]
    levels = sorted(set(float(v) for v in mu_grid) | {0.0})
    fractions = (0.0, 0.5, 1.0) if killing_grid is None else tuple(killing_grid)
    inner_choices = [sorted({f * kill[x] for f in fractions}) for x in inner]
    out = []
    for r in range(len(extra) + 1):
        for added in itertools.combinations(extra, r):
            O = frozenset(inner) | frozenset(added)
            for inner_mu in itertools.product(*inner_choices):
                for added_mu in itertools.product(levels, repeat=len(added)):
                    mu = np.zeros(q.n)
                    mu[inner] = inner_mu
                    mu[list(added)] = added_mu
                    pair = AdmissiblePair(O, mu)
                    out.append((pair, restricted_form(qm, pair)))
    return out
