"""Hypothesis strategies for random Markovian forms."""
import numpy as np
from hypothesis import strategies as st

from sandwich_forms import GraphForm, MeasureSpace, form_from_graph

weights = st.floats(0.0, 3.0, allow_nan=False).map(lambda w: 0.0 if w < 0.5 else w)


@st.composite
def graph_forms(draw, min_nodes=1, max_nodes=6, killing=True, full_support=False):
    n = draw(st.integers(min_nodes, max_nodes))
    mass = np.array(draw(st.lists(st.floats(0.25, 4.0), min_size=n, max_size=n)))
    b = np.zeros((n, n))
    for x in range(n):
        for y in range(x + 1, n):
            b[x, y] = b[y, x] = draw(weights)
    c = np.array(draw(st.lists(weights, min_size=n, max_size=n))) if killing else np.zeros(n)
    if full_support:
        support = tuple(range(n))
    else:
        support = tuple(sorted(draw(st.sets(st.integers(0, n - 1), min_size=1))))
    return form_from_graph(GraphForm(MeasureSpace(mass), b, c, support))


@st.composite
def form_and_vector(draw, **kw):
    q = draw(graph_forms(**kw))
    vals = draw(st.lists(st.floats(-5, 5), min_size=q.n, max_size=q.n))
    f = np.zeros(q.n)
    f[q.idx] = np.array(vals)[q.idx]
    return q, f
