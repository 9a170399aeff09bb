"""Cut-off forms ``Q_phi``, the active main part and the killing part."""
from __future__ import annotations

import numpy as np

from .core import (
    QuadForm,
    ZERO_TOL,
    SAMPLE_TOL,
    as_vec,
    edge_weights,
    evaluate,
    is_markovian,
    killing_weights,
    laplacian,
)
from .errors import DomainViolation, NotMarkovian, RangeViolation


def _check_cutoff(q, phi, name="phi"):
    phi = as_vec(q, phi, name)
    if np.any(phi < -ZERO_TOL) or np.any(phi > 1 + ZERO_TOL):
        raise RangeViolation(f"{name} must take values in [0, 1]")
    outside = np.ones(q.n, dtype=bool)
    outside[q.idx] = False
    if np.any(np.abs(phi[outside]) > ZERO_TOL):
        raise DomainViolation(f"{name} must vanish off the support")
    return np.clip(phi, 0.0, 1.0)


def _require_markov(q):
    if not is_markovian(q):
        raise NotMarkovian("the decomposition needs a Markovian form")


def part_form(q: QuadForm, phi) -> QuadForm:
    """The form ``(f, g) -> Q(phi f, phi g) - Q(phi f g, phi)`` on all nodes.

    With ``A`` the padded coefficients this is
    ``Phi A Phi - diag(phi * (A phi))``.  For a graph form it equals the jump
    energy with weights ``phi(x) phi(y) b(x, y)``; killing drops out.
    """
    _require_markov(q)
    phi = _check_cutoff(q, phi)
    a = q.full()
    coeff = phi[:, None] * a * phi[None, :] - np.diag(phi * (a @ phi))
    return QuadForm(q.space, q.space.nodes, (coeff + coeff.T) / 2)


def _reachable_edges(b, support):
    """Zero out edges in components of ``b`` that avoid ``support``."""
    n = b.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = list(support)
    seen[stack] = True
    while stack:
        x = stack.pop()
        for y in np.flatnonzero(b[x] > 0):
            if not seen[y]:
                seen[y] = True
                stack.append(int(y))
    keep = seen[:, None] & seen[None, :]
    return np.where(keep, b, 0.0)


def active_main_part(q: QuadForm) -> QuadForm:
    """Maximal dominating form: the pure jump part of ``q`` on all nodes.

    Ambient edges leaving the support are kept, so the main part of a
    Dirichlet-type restriction is its Neumann-type form.  Edges in components
    that never meet the support are invisible to ``q`` and dropped; nodes
    there stay in the domain with zero energy.  Without ambient edges the
    result coincides with ``part_form(q, 1_support)``.
    """
    _require_markov(q)
    b = _reachable_edges(edge_weights(q), q.support)
    return QuadForm(q.space, q.space.nodes, laplacian(b), edges=b)


def killing_part(q: QuadForm) -> QuadForm:
    """``Q - Q^(M)`` on the domain of ``q``: the diagonal of killing weights."""
    c = killing_weights(q)
    if np.any(c < 0):
        raise NotMarkovian("negative killing")
    return QuadForm(q.space, q.support, np.diag(c[q.idx]))


def part_monotonicity_check(q: QuadForm, phi, psi, samples: int = 100, seed: int = 0) -> bool:
    """Sampled check of ``Q_phi(f) <= Q_psi(f) <= Q(f)`` for ``phi <= psi``."""
    phi = _check_cutoff(q, phi, "phi")
    psi = _check_cutoff(q, psi, "psi")
    if np.any(phi > psi + ZERO_TOL):
        raise RangeViolation("phi must be pointwise below psi")
    q_phi = part_form(q, phi)
    q_psi = part_form(q, psi)
    rng = np.random.default_rng(seed)
    idx = q.idx
    for _ in range(samples):
        f = np.zeros(q.n)
        f[idx] = rng.normal(size=idx.size)
        a, b, c = evaluate(q_phi, f, f), evaluate(q_psi, f, f), evaluate(q, f, f)
        slack = SAMPLE_TOL * max(1.0, abs(c))
        if a > b + slack or b > c + slack:
            return False
    return True
