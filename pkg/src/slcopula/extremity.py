"""Extreme-point classification for the three diagonal classes.

Copula class: extreme iff ``x delta'/delta`` lies strictly inside ]1, 2[ only
on a null set.  Quasi-copula class: extreme iff ``(delta/x)'`` is a.e. either
0 or ``1/x``.  Semi-copula class: extreme iff the diagonal is a one-jump step.
"Null set" is an estimated measure at most ``tol.eps_measure`` on the
midpoint grid of ``]origin_eps, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagonal import DiagonalSpec, StepLeft, StepRight, validate, validation_grid
from .errors import PreconditionError
from .numerics import Tolerance, estimate_measure

__all__ = [
    "ExtremityReport",
    "classify_copula",
    "classify_semicopula",
    "classify_quasicopula",
    "quasi_envelope",
    "envelope_floor",
]


@dataclass
class ExtremityReport:
    class_tested: str
    violating_measure: float
    verdict: bool
    excluded_measure: float = 0.0
    worst_witnesses: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"class_tested": self.class_tested,
                "violating_measure": self.violating_measure,
                "verdict": self.verdict,
                "excluded_measure": self.excluded_measure,
                "worst_witnesses": [list(w) for w in self.worst_witnesses],
                "settings": self.settings}


def _criterion_points(spec: DiagonalSpec, tol: Tolerance):
    """Midpoint grid with the origin strip and declared kinks marked excluded."""
    x = (np.arange(1, tol.measure_n + 1) - 0.5) / tol.measure_n
    excluded = (x <= tol.origin_eps) | np.isin(x, np.asarray(spec.kinks))
    return x, excluded


def _worst(x, score, mask, k=5):
    """Up to ``k`` violating points with the largest score."""
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return []
    top = idx[np.argsort(-score[idx], kind="stable")[:k]]
    return [(float(x[i]), float(score[i])) for i in top]


def _measure_report(name, spec, tol, violating_fn):
    x, excluded = _criterion_points(spec, tol)
    viol, score = violating_fn(x)
    viol = viol & ~excluded
    measure = estimate_measure(lambda t: viol, tol.measure_n)
    excl = estimate_measure(lambda t: excluded, tol.measure_n)
    return ExtremityReport(
        class_tested=name,
        violating_measure=measure,
        verdict=measure <= tol.eps_measure,
        excluded_measure=excl,
        worst_witnesses=_worst(x, score, viol),
        settings={"measure_n": tol.measure_n, "eps_measure": tol.eps_measure,
                  "ratio_slack": tol.ratio_slack, "origin_eps": tol.origin_eps},
    )


def classify_copula(spec: DiagonalSpec, tol: Tolerance | None = None) -> ExtremityReport:
    """Measure of ``{x : 1/x < delta'(x)/delta(x) < 2/x}``.

    Witnesses carry ``x delta'(x)/delta(x)``; values strictly between 1 and 2
    violate extremity.
    """
    tol = tol or Tolerance()
    if not validate(spec, tol).in_copula_class:
        raise PreconditionError("spec does not generate a semilinear copula")
    s = tol.ratio_slack

    def violating(x):
        scaled = x * spec._slope(x) / spec._value(x)
        inside = (scaled > 1.0 + s) & (scaled < 2.0 - s)
        return inside, scaled

    return _measure_report("copula", spec, tol, violating)


def classify_quasicopula(spec: DiagonalSpec, tol: Tolerance | None = None) -> ExtremityReport:
    """Measure of the set where ``(delta/x)'`` is neither 0 nor ``1/x``.

    Both equalities use the absolute slack ``ratio_slack * (1 + 1/x)``.
    Witnesses carry ``(delta/x)'``.
    """
    tol = tol or Tolerance()
    if not validate(spec, tol).in_quasicopula_class:
        raise PreconditionError("spec does not generate a semilinear quasi-copula")
    s = tol.ratio_slack

    def violating(x):
        g = (x * spec._slope(x) - spec._value(x)) / (x * x)
        slack = s * (1.0 + 1.0 / x)
        good = (np.abs(g) <= slack) | (np.abs(g - 1.0 / x) <= slack)
        return ~good, g

    return _measure_report("quasicopula", spec, tol, violating)


def classify_semicopula(spec: DiagonalSpec, tol: Tolerance | None = None) -> ExtremityReport:
    """Structural test: is the diagonal a step function with one jump?

    Step variants are extreme by construction.  Any other spec is extreme iff
    on the validation grid it takes only the values 0 and ``x`` and the set
    where it equals ``x`` is a final segment of [0,1].
    """
    tol = tol or Tolerance()
    if not validate(spec, tol).in_semicopula_class:
        raise PreconditionError("spec does not generate a semilinear semi-copula")
    t = validation_grid(spec, tol.grid_n)
    d = np.asarray(spec(t))
    eps = tol.eps_mono
    zero = np.abs(d) <= eps
    ident = np.abs(d - t) <= eps
    off = ~(zero | ident)
    witnesses = [(float(t[i]), float(d[i])) for i in np.flatnonzero(off)[:5]]
    if isinstance(spec, (StepRight, StepLeft)):
        verdict = True
    else:
        # once the diagonal has left 0 it must stay on the identity
        strict_id = ident & ~zero
        started = np.maximum.accumulate(strict_id)
        verdict = not off.any() and bool(np.all(ident[started]))
    return ExtremityReport(
        class_tested="semicopula",
        violating_measure=float(np.count_nonzero(off)) / len(t),
        verdict=verdict,
        worst_witnesses=witnesses,
        settings={"grid_n": tol.grid_n, "eps_mono": eps},
    )


def quasi_envelope(t):
    """``t + t ln t`` with the limit value 0 at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    out = np.where(t > 0, t + t * np.log(np.where(t > 0, t, 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def envelope_floor(t):
    """``max(0, t + t ln t)``: the floor of the admissible region for quasi diagonals."""
    return np.maximum(0.0, quasi_envelope(t))
