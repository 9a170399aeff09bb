"""Random instances for the randomized equivalence checks.

Every generator takes a ``numpy.random.Generator`` and returns plain forms,
so a seed fixes the whole run.  Kinds are drawn uniformly; each kind names
the construction so that a disagreement can be traced back to it.
"""
from __future__ import annotations

import numpy as np

from .core import GraphForm, MeasureSpace, QuadForm, form_from_graph
from .decomposition import active_main_part
from .sandwich import AdmissiblePair, restricted_form

DOMINATION_KINDS = ("independent", "dominated", "adversarial", "support")
SANDWICH_KINDS = ("band", "overshoot", "shrunk", "perturbed", "independent")


def random_space(rng, n, n_boundary=0):
    mass = rng.uniform(0.5, 2.0, size=n)
    boundary = rng.choice(n, size=n_boundary, replace=False) if n_boundary else ()
    return MeasureSpace(mass, boundary=frozenset(int(x) for x in boundary))


def random_edges(rng, n, density=0.6, connected=True):
    b = np.triu(rng.uniform(0.1, 2.0, size=(n, n)) * (rng.random((n, n)) < density), 1)
    if connected:
        # a random spanning path keeps the graph connected
        order = rng.permutation(n)
        for x, y in zip(order[:-1], order[1:]):
            b[min(x, y), max(x, y)] = max(b[min(x, y), max(x, y)], rng.uniform(0.1, 2.0))
    return b + b.T


def random_support(rng, n, min_size=1):
    k = int(rng.integers(min_size, n + 1))
    return tuple(sorted(int(x) for x in rng.choice(n, size=k, replace=False)))


def random_markov_form(rng, space=None, n=None, support=None, killing=0.5, ambient=False):
    """Random graph form; ``killing`` is the chance that a node is killed.

    With ``ambient`` the ambient edges are kept on the form; otherwise only
    the coefficient block survives.
    """
    if space is None:
        space = random_space(rng, n if n is not None else int(rng.integers(1, 9)))
    n = space.n
    b = random_edges(rng, n, connected=bool(rng.random() < 0.7))
    c = rng.uniform(0.0, 3.0, size=n) * (rng.random(n) < killing)
    if support is None:
        support = random_support(rng, n)
    q = form_from_graph(GraphForm(space, b, c, support))
    if ambient:
        return q
    return QuadForm(space, q.support, q.coeff)


def domination_pair(rng):
    """``(kind, q, q2)`` on at most six nodes for testing ``q <= q2``.

    - ``independent``: two unrelated forms;
    - ``dominated``: ``q`` is ``q2`` on a smaller support with edges
      weakened and killing added, so ``q <= q2`` holds;
    - ``adversarial``: ``q`` equals ``q2`` except for one extra jump of
      weight ``delta`` in ``[0.1, 0.5]``, the smallest possible violation
      of positivity;
    - ``support``: ``q`` lives on a node outside the support of ``q2``.
    """
    kind = DOMINATION_KINDS[int(rng.integers(len(DOMINATION_KINDS)))]
    n = int(rng.integers(2, 7))
    space = random_space(rng, n)
    if kind == "independent":
        return kind, random_markov_form(rng, space), random_markov_form(rng, space)
    if kind == "support":
        s2 = random_support(rng, n - 1) if n > 1 else (0,)
        outside = [x for x in range(n) if x not in s2]
        s1 = tuple(sorted(set(random_support(rng, n)) | {int(rng.choice(outside))}))
        q2 = random_markov_form(rng, space, support=s2)
        return kind, random_markov_form(rng, space, support=s1), q2
    q2 = random_markov_form(rng, space, support=space.nodes)
    if kind == "dominated":
        s1 = random_support(rng, n)
        idx = np.array(s1)
        block = q2.coeff[np.ix_(idx, idx)]
        off = block - np.diag(np.diag(block))
        weaken = np.triu(rng.uniform(0.0, 1.0, size=off.shape), 1)
        weaken = weaken + weaken.T
        extra = rng.uniform(0.0, 1.0, size=len(s1)) * (rng.random(len(s1)) < 0.5)
        coeff = np.diag(np.diag(block) + extra) + off * weaken
        return kind, QuadForm(space, s1, coeff), q2
    x, y = (int(v) for v in rng.choice(n, size=2, replace=False))
    delta = rng.uniform(0.1, 0.5)
    bump = np.zeros((n, n))
    bump[x, x] = bump[y, y] = delta
    bump[x, y] = bump[y, x] = -delta
    return kind, QuadForm(space, q2.support, q2.coeff + bump), q2


def _base(rng, killing):
    n = int(rng.integers(3, 7))
    space = random_space(rng, n, n_boundary=int(rng.integers(1, n - 1)))
    b = random_edges(rng, n)
    inner = space.interior
    c = np.zeros(n)
    if killing:
        c[list(inner)] = rng.uniform(0.5, 3.0, size=len(inner))
    return form_from_graph(GraphForm(space, b, c, inner))


def _band_pair(rng, q, kill):
    n = q.n
    outer = [x for x in range(n) if x not in q.support]
    added = [x for x in outer if rng.random() < 0.5]
    mu = np.zeros(n)
    mu[added] = rng.uniform(0.0, 2.0, size=len(added)) * (rng.random(len(added)) < 0.7)
    mu[list(q.support)] = kill[list(q.support)] * rng.uniform(0.0, 1.0, size=len(q.support))
    return AdmissiblePair(frozenset(q.support) | frozenset(added), mu)


def sandwich_triple(rng):
    """``(kind, q, qprime)`` for testing the sandwich characterization.

    ``q`` is a graph form supported on the interior of a random space with a
    nonempty boundary; half of the time it carries killing.

    - ``band``: ``qprime`` is built from a random admissible pair (weights
      up to the killing on the support of ``q``);
    - ``overshoot``: as ``band`` but one weight on the support of ``q``
      exceeds the killing there;
    - ``shrunk``: a node of the support of ``q`` is left out;
    - ``perturbed``: one jump of the main part is changed by ``eps`` with
      the diagonal kept, or a jump of weight ``eps`` is added;
    - ``independent``: an unrelated form.
    """
    kind = SANDWICH_KINDS[int(rng.integers(len(SANDWICH_KINDS)))]
    q = _base(rng, killing=bool(rng.random() < 0.5))
    kill = np.zeros(q.n)
    kill[q.idx] = np.diag(q.coeff) - np.asarray(q.edges)[q.idx].sum(axis=1)
    qm = active_main_part(q)
    if kind == "independent":
        return kind, q, random_markov_form(rng, q.space)
    pair = _band_pair(rng, q, kill)
    if kind == "overshoot":
        mu = np.array(pair.mu)
        x = int(rng.choice(q.support))
        mu[x] = kill[x] + rng.uniform(0.1, 2.0)
        pair = AdmissiblePair(pair.O, mu)
    elif kind == "shrunk":
        x = int(rng.choice(q.support))
        mu = np.array(pair.mu)
        mu[x] = 0.0
        pair = AdmissiblePair(pair.O - {x}, mu)
    qprime = restricted_form(qm, pair)
    if kind != "perturbed":
        return kind, q, qprime
    full = qprime.full()
    idx = qprime.idx
    b = np.asarray(qm.edges)
    pairs = [(x, y) for x in idx for y in idx if x < y]
    x, y = pairs[int(rng.integers(len(pairs)))]
    eps = rng.uniform(0.05, 0.5)
    if b[x, y] > eps and rng.random() < 0.5:
        full[x, y] += eps
        full[y, x] += eps
    else:
        full[x, x] += eps
        full[y, y] += eps
        full[x, y] -= eps
        full[y, x] -= eps
    return kind, q, QuadForm(q.space, qprime.support, full[np.ix_(idx, idx)])
