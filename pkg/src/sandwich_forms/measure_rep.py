"""Positivity, locality and monotonicity of forms, and representing measures.

On node functions every form is determined by its values on indicators, so
the five equivalent descriptions of a "measure form" (positive and local,
the sign condition, the product condition, monotonicity, a representing
measure) all come down to: the coefficient array is diagonal with
nonnegative entries.  Each condition is nevertheless evaluated on its own
terms so that their agreement is an actual check.

Extension from a dense sublattice is trivial here: the indicators span all
node functions, and a form is recovered from its values on them by
polarization (see ``from_indicator_values``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import QuadForm, ZERO_TOL, SAMPLE_TOL, scaled_tol
from .errors import InternalInvariantViolation, NotRepresentable


def _bil(d, f, g):
    return float(f @ d.coeff @ g)


def _first_offdiag(c, tol):
    off = np.abs(c - np.diag(np.diag(c)))
    bad = np.argwhere(off > tol)
    return tuple(int(v) for v in bad[0]) if bad.size else None


def is_positive(d: QuadForm, tol: float | None = None) -> bool:
    """``d(f, g) >= 0`` for nonnegative ``f, g``: entrywise nonnegative coefficients."""
    tol = scaled_tol(d.coeff) if tol is None else tol
    return bool(np.all(d.coeff >= -tol))


def is_local(d: QuadForm, tol: float = ZERO_TOL) -> bool:
    """``fg = 0`` implies ``d(f, g) = 0``: a diagonal coefficient array."""
    return _first_offdiag(d.coeff, tol) is None


def _indicators(k):
    return np.eye(k)


def _monotone_by_sampling(d, samples, rng):
    k = len(d.support)
    e = _indicators(k)
    pairs = []
    # |f| = |g| pairs expose off-diagonal entries, (e_x, 0) exposes negative diagonals
    for x, y in itertools.combinations(range(k), 2):
        pairs.append((e[x] + e[y], e[x] - e[y]))
        pairs.append((e[x] - e[y], e[x] + e[y]))
    for x in range(k):
        pairs.append((e[x], np.zeros(k)))
    for _ in range(samples):
        f = rng.normal(size=k)
        g = f * rng.uniform(-1, 1, size=k)
        pairs.append((f, g))
    scale = scaled_tol(d.coeff, SAMPLE_TOL)
    for f, g in pairs:
        if _bil(d, g, g) > _bil(d, f, f) + scale * max(1.0, float(f @ f)):
            return False
    return True


def is_monotone(d: QuadForm, samples: int = 100, seed: int = 0) -> bool:
    """``|g| <= |f|`` implies ``d(g) <= d(f)``.

    The structural criterion (diagonal, nonnegative) and a sampled check
    with structured witnesses must agree; otherwise
    :class:`InternalInvariantViolation` is raised.
    """
    structural = is_local(d) and bool(np.all(np.diag(d.coeff) >= -scaled_tol(d.coeff)))
    sampled = _monotone_by_sampling(d, samples, np.random.default_rng(seed))
    if structural != sampled:
        raise InternalInvariantViolation("structural and sampled monotonicity disagree")
    return structural


def representing_measure(d: QuadForm) -> np.ndarray:
    """Node weights ``mu`` with ``d(f) = sum mu(x) f(x)**2``, zero off the support.

    ``mu(x) = d(delta_x)``.  Raises :class:`NotRepresentable` with the
    offending node pair when ``d`` is not positive and local.
    """
    c = d.coeff
    idx = d.idx
    witness = _first_offdiag(c, ZERO_TOL)
    if witness is not None:
        raise NotRepresentable("form is not local", (int(idx[witness[0]]), int(idx[witness[1]])))
    neg = np.flatnonzero(np.diag(c) < -scaled_tol(c))
    if neg.size:
        x = int(idx[neg[0]])
        raise NotRepresentable("form is not positive", (x, x))
    mu = np.zeros(d.n)
    mu[idx] = np.maximum(np.diag(c), 0.0)
    return mu


def from_indicator_values(d: QuadForm) -> np.ndarray:
    """Rebuild coefficients from values on indicators and their pairwise sums."""
    k = len(d.support)
    e = _indicators(k)
    diag = np.array([_bil(d, e[x], e[x]) for x in range(k)])
    out = np.diag(diag)
    for x, y in itertools.combinations(range(k), 2):
        v = (_bil(d, e[x] + e[y], e[x] + e[y]) - diag[x] - diag[y]) / 2
        out[x, y] = out[y, x] = v
    return out


@dataclass
class SuiteReport:
    verdicts: dict = field(default_factory=dict)

    @property
    def consistent(self):
        return len(set(self.verdicts.values())) <= 1

    @property
    def verdict(self):
        return next(iter(self.verdicts.values()))


def _sign_condition(d, samples, rng):
    k = len(d.support)
    e = _indicators(k)
    tol = scaled_tol(d.coeff, SAMPLE_TOL)
    pairs = [(e[x], s * e[y]) for x in range(k) for y in range(k) for s in (1.0, -1.0)
             if x != y or s > 0]
    for _ in range(samples):
        f = rng.normal(size=k)
        g = np.sign(f) * np.abs(rng.normal(size=k)) * (rng.random(k) < 0.7)
        pairs.append((f, g))
    return all(_bil(d, f, g) >= -tol * max(1.0, float(np.abs(f) @ np.abs(g))) for f, g in pairs)


def _product_condition(d, samples, rng):
    k = len(d.support)
    e = _indicators(k)
    z = np.zeros(k)
    tol = scaled_tol(d.coeff, SAMPLE_TOL)
    quads = []
    for x in range(k):
        for y in range(k):
            for s in (1.0, -1.0):
                if x != y or s > 0:
                    quads.append((e[x], s * e[y], z, z))
    for _ in range(samples):
        f, g, f2 = rng.normal(size=(3, k))
        slack = np.abs(rng.normal(size=k)) * (rng.random(k) < 0.5)
        f2 = np.where(np.abs(f2) < 1e-3, 1e-3, f2)
        g2 = (f * g - slack) / f2
        quads.append((f, g, f2, g2))
    for f, g, f2, g2 in quads:
        size = float(np.abs(f) @ np.abs(g) + np.abs(f2) @ np.abs(g2))
        if _bil(d, f, g) < _bil(d, f2, g2) - tol * max(1.0, size):
            return False
    return True


def equivalence_suite(d: QuadForm, samples: int = 100, seed: int = 0) -> SuiteReport:
    """Evaluate the five equivalent measure-form conditions independently.

    Keys: ``positive_local``, ``sign``, ``product``, ``monotone``,
    ``measure``.  ``report.consistent`` is the finite instance of their
    equivalence.
    """
    rng = np.random.default_rng(seed)
    report = SuiteReport()
    report.verdicts["positive_local"] = is_positive(d) and is_local(d)
    report.verdicts["sign"] = _sign_condition(d, samples, rng)
    report.verdicts["product"] = _product_condition(d, samples, rng)
    report.verdicts["monotone"] = _monotone_by_sampling(d, samples, rng)
    try:
        mu = representing_measure(d)
        f = np.eye(d.n)[d.idx]
        report.verdicts["measure"] = bool(np.allclose(
            [_bil(d, row[d.idx], row[d.idx]) for row in f], mu[d.idx], atol=scaled_tol(d.coeff)))
    except NotRepresentable:
        report.verdicts["measure"] = False
    return report
