import numpy as np
import pytest
from hypothesis import given, strategies as st

from sandwich_forms import (
    DomainViolation,
    GraphForm,
    MeasureSpace,
    NotMarkovian,
    QuadForm,
    diagonal_form,
    evaluate,
    form_from_graph,
    form_norm,
    graph_from_form,
    is_markovian,
    path_graph,
)
from sandwich_forms.core import killing_weights
from strategies import form_and_vector, graph_forms


def test_path_energy(p3):
    assert evaluate(p3, [1, 2, 3], [1, 2, 3]) == 2.0


def test_constants_are_null(p3):
    assert p3(np.ones(3)) == 0.0


def test_killing_fixture(p3_killing):
    assert p3_killing([0, 1, 0]) == 7.0


def test_graph_from_form_single_edge():
    q = QuadForm(MeasureSpace.uniform(2), (0, 1), [[1, -1], [-1, 1]])
    g = graph_from_form(q)
    assert g.b[0, 1] == 1.0
    assert np.array_equal(g.c, [0, 0])


def test_graph_from_form_row_sums():
    q = QuadForm(MeasureSpace.uniform(2), (0, 1), [[2, -1], [-1, 1]])
    g = graph_from_form(q)
    assert g.b[0, 1] == 1.0
    assert np.array_equal(g.c, [1, 0])


def test_positive_offdiagonal_is_not_markovian():
    q = QuadForm(MeasureSpace.uniform(2), (0, 1), [[1, 0.5], [0.5, 1]])
    assert not is_markovian(q)
    with pytest.raises(NotMarkovian):
        graph_from_form(q)


def test_diagonal_forms_are_markovian():
    q = diagonal_form(MeasureSpace.uniform(3), [0.0, 2.0, 1.0])
    assert is_markovian(q)


def test_zero_function(p3):
    assert evaluate(p3, np.zeros(3), np.zeros(3)) == 0.0
    assert form_norm(p3, np.zeros(3)) == 0.0


def test_form_norm(p3):
    assert p3([1, 0, 0]) == 1.0
    assert form_norm(p3, [1, 0, 0]) == 2.0


def test_form_norm_linear_in_mass():
    f = np.array([1.0, -2.0, 0.5])
    q1 = form_from_graph(path_graph(3))
    q2 = form_from_graph(path_graph(3, masses=[2, 2, 2]))
    l2 = float(f @ f)
    assert form_norm(q2, f) - form_norm(q1, f) == pytest.approx(l2)


def test_domain_violation():
    g = path_graph(3)
    q = form_from_graph(GraphForm(g.space, g.b, g.c, (1,)))
    with pytest.raises(DomainViolation):
        evaluate(q, [1, 1, 0], [0, 1, 0])


def test_nonsymmetric_coefficients_rejected():
    with pytest.raises(ValueError):
        QuadForm(MeasureSpace.uniform(2), (0, 1), [[1, -1], [0, 1]])


def test_indefinite_coefficients_rejected():
    with pytest.raises(ValueError):
        QuadForm(MeasureSpace.uniform(2), (0, 1), [[1, 0], [0, -1]])


def test_interior_mass_must_be_positive():
    with pytest.raises(ValueError):
        MeasureSpace(np.array([1.0, 0.0]))
    MeasureSpace(np.array([1.0, 0.0]), boundary=frozenset({1}))


def test_ambient_edges_keep_dirichlet_killing_apart():
    g = path_graph(3)
    q = form_from_graph(GraphForm(g.space, g.b, g.c, (1,)))
    assert q.coeff[0, 0] == 2.0
    assert np.array_equal(killing_weights(q), [0, 0, 0])
    bare = QuadForm(q.space, q.support, q.coeff)
    assert np.array_equal(killing_weights(bare), [0, 2, 0])


@given(graph_forms())
def test_round_trip(q):
    back = form_from_graph(graph_from_form(q))
    assert back.support == q.support
    assert np.array_equal(back.coeff, q.coeff)


@given(graph_forms())
def test_graph_forms_are_markovian(q):
    assert is_markovian(q)


@given(form_and_vector())
def test_absolute_value_contracts(data):
    q, f = data
    assert q(np.abs(f)) <= q(f) + 1e-10 * max(1.0, abs(q(f)))


@given(form_and_vector(), st.integers(0, 2**31))
def test_bilinear_and_symmetric(data, seed):
    q, f = data
    g = np.zeros(q.n)
    g[q.idx] = np.random.default_rng(seed).normal(size=len(q.support))
    a = evaluate(q, f, g)
    scale = 1e-12 * max(1.0, np.abs(q.coeff).max()) * max(1.0, np.abs(f).max()) * max(1.0, np.abs(g).max()) * q.n ** 2
    assert abs(a - evaluate(q, g, f)) <= scale
    assert abs(a - (q(f + g) - q(f - g)) / 4) <= 10 * scale
    assert abs(evaluate(q, 2 * f + g, g) - (2 * a + q(g))) <= 10 * scale


@given(form_and_vector())
def test_formula_matches_edge_sum(data):
    q, f = data
    g = graph_from_form(q)
    d = f[:, None] - f[None, :]
    direct = 0.5 * np.sum(g.b * d * d) + np.sum(g.c * f * f)
    assert q(f) == pytest.approx(direct, rel=1e-12, abs=1e-12)
