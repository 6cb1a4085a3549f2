"""Spearman's rho, Gini's gamma and Spearman's footrule.

Closed forms for the extreme family ``max(m t, t^2)`` and its mixtures, plus a
quadrature oracle that works from the copula values alone::

    rho      = 12 int int C(u, v) du dv - 3
    footrule = 6 int C(t, t) dt - 2
    gamma    = 4 (int C(u, 1 - u) du - int (u - C(u, u)) du)
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .choquet import DiscreteMeasure
from .errors import PreconditionError
from .numerics import Tolerance, integrate_1d, simpson_rule
from .semilinear import SemilinearObject

__all__ = [
    "MeasureTriple",
    "closed_form_extreme",
    "closed_form_mixture",
    "numeric_measures",
    "gamma_extreme",
]


@dataclass(frozen=True)
class MeasureTriple:
    rho: float
    gamma: float
    footrule: float

    def to_json(self, method: str | None = None) -> dict:
        out = asdict(self)
        if method:
            out["method"] = method
        return out

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.gamma, self.footrule])


def gamma_extreme(m: float) -> float:
    if m <= 0.5:
        return 2.0 * m**3 / 3.0
    return -2.0 * m**3 / 3.0 + 4.0 * m**2 - 3.0 * m + 2.0 / 3.0


def closed_form_extreme(m: float) -> MeasureTriple:
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"m must lie in [0,1], got {m}")
    return MeasureTriple(rho=m**4, gamma=gamma_extreme(m), footrule=m**3)


def closed_form_mixture(mu: DiscreteMeasure) -> MeasureTriple:
    return MeasureTriple(
        rho=mu.expect(lambda m: m**4),
        gamma=mu.expect(gamma_extreme),
        footrule=mu.expect(lambda m: m**3),
    )


def _inner_integral(C, u: float, kinks, n: int) -> float:
    """``int_0^1 C(u, v) dv`` split at ``v = u`` and at the kinks."""
    return integrate_1d(lambda v: C(np.full_like(v, u), v), 0.0, 1.0, n,
                        breaks=(u, *kinks))


def numeric_measures(obj: SemilinearObject, tol: Tolerance | None = None) -> MeasureTriple:
    """Quadrature estimate of (rho, gamma, footrule) for a copula-class object.

    Every integral is composite Simpson split at the declared kinks of the
    diagonal (and at the main or opposite diagonal where the integrand has a
    corner), so piecewise-smooth integrands keep full order.
    """
    if obj.declared_class != "copula":
        raise PreconditionError("association measures need a copula-class object")
    tol = tol or Tolerance()
    C = obj._eval
    kinks = tuple(obj.diag.kinks)
    n1 = tol.quad_n
    n2 = tol.quad_n_2d

    # outer rule split at kinks; inner rule split at v = u as well
    edges = [0.0, *sorted(k for k in kinks if 0 < k < 1), 1.0]
    double = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        k = max(2, 2 * int(round(0.5 * n2 * (b - a))))
        xs, ws = simpson_rule(a, b, k)
        double += sum(w * _inner_integral(C, float(x), kinks, n2) for x, w in zip(xs, ws))
    rho = 12.0 * double - 3.0

    diag_int = integrate_1d(lambda t: C(t, t), 0.0, 1.0, n1, breaks=kinks)
    footrule = 6.0 * diag_int - 2.0

    anti_breaks = (0.5, *kinks, *(1.0 - k for k in kinks))
    anti = integrate_1d(lambda t: C(t, 1.0 - t), 0.0, 1.0, n1, breaks=anti_breaks)
    gap = integrate_1d(lambda t: t - C(t, t), 0.0, 1.0, n1, breaks=kinks)
    gamma = 4.0 * (anti - gap)
    return MeasureTriple(rho=float(rho), gamma=float(gamma), footrule=float(footrule))
