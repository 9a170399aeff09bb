import numpy as np
import pytest
from hypothesis import given, strategies as st

from sandwich_forms import (
    MeasureSpace,
    NegativeTime,
    QuadForm,
    SpaceMismatch,
    active_main_part,
    diagonal_form,
    dominates,
    dominates_form,
    dominates_semigroup,
    form_from_graph,
    interval_laplacian,
    ouhabaz_equivalence_test,
    path_graph,
    semigroup,
    semigroups,
    spectrum,
)
from sandwich_forms.core import GraphForm
from strategies import graph_forms


def test_time_zero_is_projection():
    g = path_graph(3)
    q = form_from_graph(GraphForm(g.space, g.b, g.c, (0, 1)))
    assert np.allclose(semigroup(q, 0.0), np.diag([1.0, 1.0, 0.0]), atol=1e-14)


def test_scalar_semigroup():
    q = QuadForm(MeasureSpace.uniform(1), (0,), [[3.0]])
    assert semigroup(q, 0.7)[0, 0] == pytest.approx(np.exp(-2.1), rel=1e-14)


def test_p3_semigroup_is_markov(p3):
    for t in (0.1, 1.0, 10.0):
        s = semigroup(p3, t)
        assert s.min() >= -1e-12
        assert np.all(s @ np.ones(3) <= 1 + 1e-12)


def test_negative_time(p3):
    with pytest.raises(NegativeTime):
        semigroup(p3, -1.0)


def test_space_mismatch(p3):
    other = form_from_graph(path_graph(3, masses=[1, 2, 1]))
    with pytest.raises(SpaceMismatch):
        dominates_form(p3, other)


def test_self_domination(p3_killing):
    r = dominates(p3_killing, p3_killing)
    assert r.form_verdict and r.semigroup_verdict
    assert r.max_violation <= 1e-15


def test_dirichlet_below_neumann():
    qd = interval_laplacian(31, "dirichlet")
    qn = interval_laplacian(31, "neumann")
    r = dominates(qd, qn, times=(0.01, 0.1, 1.0))
    assert r.semigroup_verdict and r.form_verdict
    back = dominates(qn, qd, times=(0.01, 0.1, 1.0))
    assert not back.semigroup_verdict and not back.form_verdict
    assert back.witness is not None


def test_dirichlet_point_inside_p3(p3):
    q = form_from_graph(GraphForm(p3.space, np.array(p3.edges), np.zeros(3), (1,)))
    assert np.array_equal(q.coeff, [[2.0]])
    r = dominates(q, p3)
    assert r.order_ideal_ok and r.positivity_ok and r.semigroup_verdict


def test_smaller_support_breaks_order_ideal(p3):
    q2 = form_from_graph(GraphForm(p3.space, np.array(p3.edges), np.zeros(3), (0, 1)))
    r = dominates_form(p3, q2)
    assert not r.order_ideal_ok
    assert r.witness == (2, 2)


def test_adversarial_single_entry():
    q2 = form_from_graph(path_graph(3))
    coeff = np.array(q2.coeff)
    coeff[0, 2] = coeff[2, 0] = -0.1
    coeff[0, 0] += 0.1
    coeff[2, 2] += 0.1
    q = QuadForm(q2.space, q2.support, coeff)
    r = dominates(q, q2)
    assert r.form_verdict is False and r.semigroup_verdict is False
    assert r.witness == (0, 2)


def test_equivalence_seed_one():
    report = ouhabaz_equivalence_test(seed=1, trials=200)
    assert report.trials == 200
    assert report.disagreements == []
    assert 0 < report.dominated < 200


def test_zero_trials():
    report = ouhabaz_equivalence_test(trials=0)
    assert report.trials == 0 and report.ok


def test_single_edge_spectrum():
    q = form_from_graph(path_graph(2))
    assert np.allclose(spectrum(q), [0.0, 2.0], atol=1e-14)


def test_diagonal_spectrum():
    q = diagonal_form(MeasureSpace.uniform(3), [3.0, 1.0, 2.0])
    assert np.allclose(spectrum(q), [1.0, 2.0, 3.0], atol=1e-14)


@pytest.mark.parametrize("n", [5, 31])
def test_dirichlet_closed_form(n):
    h = 1 / (n + 1)
    k = np.arange(1, n + 1)
    exact = 4 / h**2 * np.sin(k * np.pi * h / 2) ** 2
    assert np.allclose(spectrum(interval_laplacian(n, "dirichlet")), exact, rtol=1e-10)


@given(graph_forms(), st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_semigroup_law(q, s, t):
    a, b, ab = semigroups(q, [s, t, s + t])
    assert np.max(np.abs(a @ b - ab)) <= 1e-9


@given(graph_forms(), st.floats(0.0, 5.0))
def test_semigroups_are_markov(q, t):
    s = semigroup(q, t)
    assert s.min() >= -1e-12
    assert np.all(s @ q.space.indicator(q.support) <= 1 + 1e-12)


@given(graph_forms(), st.floats(0.01, 3.0))
def test_semigroup_self_adjoint(q, t):
    s = semigroup(q, t)
    m = np.diag(q.space.mass)
    assert np.max(np.abs(m @ s - (m @ s).T)) <= 1e-10


@given(graph_forms(max_nodes=6))
def test_natural_order_interlacing(q):
    qm = active_main_part(q)
    lam, lam_m = spectrum(q), spectrum(qm)
    assert np.all(lam >= lam_m[: lam.size] - 1e-9 * max(1.0, lam.max(initial=0)))
