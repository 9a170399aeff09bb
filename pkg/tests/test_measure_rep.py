import numpy as np
import pytest
from hypothesis import given, strategies as st

from sandwich_forms import (
    MeasureSpace,
    NotRepresentable,
    QuadForm,
    diagonal_form,
    equivalence_suite,
    form_from_graph,
    from_indicator_values,
    is_local,
    is_monotone,
    is_positive,
    killing_part,
    path_graph,
    representing_measure,
)
from strategies import graph_forms


def _form(coeff, signed=True):
    coeff = np.asarray(coeff, dtype=float)
    return QuadForm(MeasureSpace.uniform(len(coeff)), range(len(coeff)), coeff, signed=signed)


def test_positive_examples(p3):
    assert is_positive(diagonal_form(MeasureSpace.uniform(3), [0, 1, 2]))
    assert not is_positive(_form([[1, -0.1], [-0.1, 1]]))
    assert not is_positive(p3)


def test_local_examples(p3, p3_killing):
    assert is_local(diagonal_form(MeasureSpace.uniform(3), [4, 1, 2]))
    assert not is_local(p3)
    assert is_local(killing_part(p3_killing))


def test_monotone_examples():
    assert is_monotone(_form(np.diag([1.0, 2.0])))
    assert not is_monotone(_form(np.diag([1.0, -1.0])))
    d = _form([[1, -1], [-1, 1]])
    f, g = np.array([1.0, 1.0]), np.array([1.0, -1.0])
    assert d(f) == 0.0 and d(g) == 4.0
    assert not is_monotone(d)


def test_measure_examples(p3):
    assert np.array_equal(representing_measure(_form(np.diag([0.0, 5.0, 0.0]))), [0, 5, 0])
    assert np.array_equal(representing_measure(_form(np.zeros((2, 2)))), [0, 0])
    with pytest.raises(NotRepresentable) as info:
        representing_measure(p3)
    assert info.value.witness == (0, 1)


def test_suite_examples(p3):
    assert all(equivalence_suite(diagonal_form(MeasureSpace.uniform(3), [1, 0, 2])).verdicts.values())
    report = equivalence_suite(p3)
    assert report.consistent and report.verdict is False
    rng = np.random.default_rng(7)
    coeff = np.diag(rng.uniform(1, 2, size=4))
    coeff[1, 2] = coeff[2, 1] = 1e-3
    report = equivalence_suite(_form(coeff))
    assert report.consistent and report.verdict is False
    assert set(report.verdicts) == {"positive_local", "sign", "product", "monotone", "measure"}


def test_reextension_from_indicators_is_identity(p3_killing):
    assert np.array_equal(from_indicator_values(p3_killing), p3_killing.coeff)


@given(st.lists(st.floats(0, 10), min_size=1, max_size=7))
def test_measure_reconstructs_diagonal_forms(weights):
    d = diagonal_form(MeasureSpace.uniform(len(weights)), weights)
    mu = representing_measure(d)
    assert np.array_equal(np.diag(mu), d.coeff)
    assert all(equivalence_suite(d).verdicts.values())


@given(graph_forms(max_nodes=6), st.integers(0, 2**31))
def test_local_forms_see_only_absolute_values(q, seed):
    d = killing_part(q)
    f = np.zeros(q.n)
    f[q.idx] = np.random.default_rng(seed).normal(size=len(q.support))
    assert abs(d(f) - d(np.abs(f))) <= 1e-10 * max(1.0, d(f))


@given(graph_forms(max_nodes=6))
def test_suite_agrees_on_graph_forms(q):
    assert equivalence_suite(q).consistent
    assert equivalence_suite(killing_part(q)).consistent
