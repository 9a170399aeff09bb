"""Heat semigroups of finite forms and the two sides of Ouhabaz' criterion."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import QuadForm, ZERO_TOL, scaled_tol
from .errors import NegativeTime, SpaceMismatch

log = logging.getLogger(__name__)

DEFAULT_TIMES = (0.05, 0.5, 2.0)


@dataclass(frozen=True)
class DominationReport:
    """Verdicts for ``q <= q2`` (``q2`` dominates ``q``).

    Fields a check did not run are ``None``.  ``witness`` is ``(t, x, y)``
    for a semigroup failure and ``(x, y)`` for a form-level failure, with
    node indices into the space.
    """

    semigroup_verdict: bool | None = None
    form_verdict: bool | None = None
    order_ideal_ok: bool | None = None
    positivity_ok: bool | None = None
    witness: tuple | None = None
    max_violation: float = 0.0

    @property
    def agree(self):
        return self.semigroup_verdict == self.form_verdict

    def merged(self, other: "DominationReport") -> "DominationReport":
        pick = lambda a, b: a if a is not None else b  # noqa: E731
        return DominationReport(
            semigroup_verdict=pick(self.semigroup_verdict, other.semigroup_verdict),
            form_verdict=pick(self.form_verdict, other.form_verdict),
            order_ideal_ok=pick(self.order_ideal_ok, other.order_ideal_ok),
            positivity_ok=pick(self.positivity_ok, other.positivity_ok),
            witness=pick(self.witness, other.witness),
            max_violation=max(self.max_violation, other.max_violation),
        )


def _eigensystem(q: QuadForm):
    """Eigenpairs of ``M^-1/2 C M^-1/2`` on the support."""
    idx = q.idx
    m = q.space.mass[idx]
    if np.any(m <= 0):
        raise ValueError("semigroup needs positive mass on the support")
    r = 1.0 / np.sqrt(m)
    sym = r[:, None] * q.coeff * r[None, :]
    lam, vec = np.linalg.eigh((sym + sym.T) / 2)
    return idx, np.sqrt(m), lam, vec


def spectrum(q: QuadForm) -> np.ndarray:
    """Ascending eigenvalues of the operator ``M^-1 C`` on the support."""
    if not q.support:
        return np.zeros(0)
    return _eigensystem(q)[2]


def semigroups(q: QuadForm, times) -> np.ndarray:
    """``e^{-tL}`` for each ``t`` in ``times``, zero-padded to ``n x n``.

    Returns an array of shape ``(len(times), n, n)``.  One eigendecomposition
    serves all times.
    """
    times = np.asarray(list(times), dtype=float)
    if np.any(times < 0):
        raise NegativeTime("semigroup time must be nonnegative")
    out = np.zeros((times.size, q.n, q.n))
    if not q.support or not times.size:
        return out
    idx, sqm, lam, vec = _eigensystem(q)
    for k, t in enumerate(times):
        sym = (vec * np.exp(-t * lam)) @ vec.T
        out[k][np.ix_(idx, idx)] = sym / sqm[:, None] * sqm[None, :]
    return out


def semigroup(q: QuadForm, t: float) -> np.ndarray:
    return semigroups(q, [t])[0]


def _same_space(q, q2):
    if q.space != q2.space:
        raise SpaceMismatch("forms live on different measure spaces")


def dominates_semigroup(q: QuadForm, q2: QuadForm, times=DEFAULT_TIMES, tol: float = ZERO_TOL) -> DominationReport:
    """Entrywise ``e^{-tL} <= e^{-tL2} + tol`` for every listed time."""
    _same_space(q, q2)
    times = list(times)
    diff = semigroups(q, times) - semigroups(q2, times)
    worst = float(diff.max(initial=0.0))
    bad = np.argwhere(diff > tol)
    witness = None
    if bad.size:
        k, x, y = bad[0]
        witness = (times[k], int(x), int(y))
    elif worst > 0:
        log.debug("semigroup tie within tolerance: %.3e", worst)
    return DominationReport(semigroup_verdict=not bad.size, witness=witness, max_violation=worst)


def dominates_form(q: QuadForm, q2: QuadForm) -> DominationReport:
    """Order ideal and positivity clauses for ``q <= q2``.

    The nonnegative cone is generated by node indicators, so positivity of
    ``Q - Q2`` on nonnegative pairs is entrywise nonnegativity of the
    coefficient difference on the support of ``q``.
    """
    _same_space(q, q2)
    inner = set(q.support)
    order_ok = inner <= set(q2.support)
    idx = q.idx
    diff = q.coeff - q2.full()[np.ix_(idx, idx)]
    tol = max(scaled_tol(q.coeff), scaled_tol(q2.coeff))
    worst = float(-diff.min(initial=0.0))
    bad = np.argwhere(diff < -tol)
    pos_ok = not bad.size
    witness = None
    if not order_ok:
        x = min(inner - set(q2.support))
        witness = (x, x)
    elif bad.size:
        i, j = bad[0]
        witness = (int(idx[i]), int(idx[j]))
    return DominationReport(
        form_verdict=order_ok and pos_ok,
        order_ideal_ok=order_ok,
        positivity_ok=pos_ok,
        witness=witness,
        max_violation=worst,
    )


def dominates(q: QuadForm, q2: QuadForm, times=DEFAULT_TIMES, tol: float = ZERO_TOL) -> DominationReport:
    """Both criteria; ``report.agree`` is the finite instance of their equivalence."""
    return dominates_form(q, q2).merged(dominates_semigroup(q, q2, times, tol))


@dataclass
class EquivalenceReport:
    trials: int = 0
    agreements: int = 0
    dominated: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.disagreements


def ouhabaz_equivalence_test(seed: int = 1, trials: int = 200, times=DEFAULT_TIMES, tol: float = ZERO_TOL):
    """Randomized comparison of the form-level and semigroup-level verdicts.

    Pairs come from :func:`sandwich_forms.random_forms.domination_pair` on at
    most six nodes.  Each disagreement is recorded as
    ``(trial, kind, form_verdict, semigroup_verdict)``.
    """
    from .random_forms import domination_pair

    rng = np.random.default_rng(seed)
    report = EquivalenceReport()
    for trial in range(trials):
        kind, q, q2 = domination_pair(rng)
        r = dominates(q, q2, times, tol)
        report.trials += 1
        report.dominated += bool(r.form_verdict)
        if r.agree:
            report.agreements += 1
        else:
            report.disagreements.append((trial, kind, r.form_verdict, r.semigroup_verdict))
    return report
