"""Pointwise asymmetry of semilinear copulas and its sharp bounds.

``chi`` compares ``(u, v)`` with its mirror ``(1-v, 1-u)`` across the
opposite diagonal, ``varrho`` compares the points folded through
``(1/2, 1/2)``, and ``xi`` is the pointwise radial asymmetry
``|C - C_hat|``.  Over all semilinear copulas, ``chi`` is squeezed between a
product-form lower bound and a quotient-form upper bound; ``xi`` is bounded
by ``radial_upper``.  The extreme families ``max(m t, t^2)`` and
``min(t^2/p, t)`` attain them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .diagonal import FamilyM, FamilyP
from .numerics import GridMap
from .semilinear import SemilinearObject, _square

__all__ = [
    "chi",
    "varrho",
    "xi",
    "bounds",
    "folded_bounds",
    "AsymmetryBounds",
    "map_grid",
    "bounds_grid",
    "attain_bounds",
    "Attainment",
]

FUNCTIONALS = ("chi", "varrho", "xi")


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def chi(obj: SemilinearObject, u, v):
    u, v = _square(u, v)
    C = obj._eval
    return _out(C(np.maximum(u, 1 - v), np.maximum(v, 1 - u))
                - C(np.minimum(u, 1 - v), np.minimum(v, 1 - u)))


def varrho(obj: SemilinearObject, u, v):
    u, v = _square(u, v)
    C = obj._eval
    return _out(C(np.maximum(u, 1 - u), np.maximum(v, 1 - v))
                - C(np.minimum(u, 1 - u), np.minimum(v, 1 - v)))


def xi(obj: SemilinearObject, u, v):
    u, v = _square(u, v)
    C = obj._eval
    return _out(np.abs(C(u, v) - C(1 - u, 1 - v) - u - v + 1))


@dataclass(frozen=True)
class AsymmetryBounds:
    lower: float | np.ndarray
    upper: float | np.ndarray
    radial_upper: float | np.ndarray


def bounds(u, v) -> AsymmetryBounds:
    """Product-form lower, quotient-form upper and radial upper bound at ``(u, v)``."""
    u, v = _square(u, v)
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    below = v <= 1 - u
    s = np.abs(1 - u - v)
    hi_safe = np.where(hi > 0, hi, 1.0)
    lo_safe = np.where(lo < 1, lo, 0.0)
    lower = np.where(below, s * (1 - lo), s * hi)
    upper = np.where(below, s / (1 - lo_safe), s / hi_safe)
    radial = np.where(below, s * lo / (1 - lo_safe), s * (1 - hi) / hi_safe)
    return AsymmetryBounds(_out(lower), _out(upper), _out(radial))


def folded_bounds(u, v) -> AsymmetryBounds:
    """Bounds valid for ``varrho`` everywhere: evaluated at the point folded into
    ``[0, 1/2]^2``, where ``varrho`` coincides with ``chi``."""
    u, v = _square(u, v)
    return bounds(np.minimum(u, 1 - u), np.minimum(v, 1 - v))


def map_grid(obj: SemilinearObject, functional: str, n: int,
             with_bounds: bool = False) -> GridMap:
    """Node grid ``(i/n, j/n)`` of ``chi``, ``varrho`` or ``xi``."""
    if functional not in FUNCTIONALS:
        raise ValueError(f"functional must be one of {FUNCTIONALS}")
    if n < 2:
        raise ValueError("n must be at least 2")
    g = np.arange(n + 1) / n
    U, V = np.meshgrid(g, g, indexing="ij")
    f = {"chi": chi, "varrho": varrho, "xi": xi}[functional]
    extra = {}
    if with_bounds:
        b = bounds(U, V)
        extra = {"lower": b.lower, "upper": b.upper, "radial_upper": b.radial_upper}
    return GridMap(n, f(obj, U, V), "asymmetry", extra)


def bounds_grid(n: int) -> GridMap:
    """Bounds on the node grid; ``values`` holds the lower bound."""
    g = np.arange(n + 1) / n
    U, V = np.meshgrid(g, g, indexing="ij")
    b = bounds(U, V)
    return GridMap(n, b.lower, "asymmetry",
                   {"upper": b.upper, "radial_upper": b.radial_upper})


@dataclass(frozen=True)
class Attainment:
    value: float
    family: str
    param: float

    def to_json(self):
        return {"value": self.value, "family": self.family, "param": self.param}


def _family_obj(family: str, param: float) -> SemilinearObject:
    spec = FamilyM(param) if family == "m" else FamilyP(param)
    return SemilinearObject(spec, "copula")


def _search(objective, family: str, grid: np.ndarray, breaks, sign: float) -> Attainment:
    """Best ``sign * objective`` over the parameter grid and the breakpoints
    where the objective has corners, refined by bounded search on each smooth
    piece."""
    lo, hi = float(grid[0]), float(grid[-1])
    cuts = sorted({lo, hi, *(b for b in breaks if lo < b < hi)})
    cands = sorted(set(map(float, grid)) | set(cuts))

    def score(q):
        return sign * objective(_family_obj(family, q))

    best_q = max(cands, key=score)
    best_val = score(best_q)
    for a, b in zip(cuts[:-1], cuts[1:]):
        res = minimize_scalar(lambda q: -score(q), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-13})
        if -res.fun > best_val:
            best_q, best_val = float(res.x), float(-res.fun)
    return Attainment(sign * best_val, family, best_q)


def attain_bounds(u: float, v: float, param_grid_n: int = 201) -> dict:
    """Search both extreme families for the extreme values of ``chi`` and ``xi``.

    Returns ``{"sup_chi", "inf_chi", "sup_xi"}``, each an :class:`Attainment`
    naming the winning family and parameter.
    """
    if not (0.0 < u < 1.0 and 0.0 < v < 1.0):
        raise ValueError("attain_bounds needs an interior point")
    m_grid = np.linspace(0.0, 1.0, param_grid_n)
    p_grid = np.linspace(1.0 / param_grid_n, 1.0, param_grid_n)
    # the objective is smooth in the parameter except where it hits these
    breaks = (u, v, 1.0 - u, 1.0 - v)

    def chi_at(obj):
        return chi(obj, u, v)

    def xi_at(obj):
        return xi(obj, u, v)

    def pick(objective, sign):
        cands = [_search(objective, "m", m_grid, breaks, sign),
                 _search(objective, "p", p_grid, breaks, sign)]
        return max(cands, key=lambda a: sign * a.value)

    return {"sup_chi": pick(chi_at, 1.0),
            "inf_chi": pick(chi_at, -1.0),
            "sup_xi": pick(xi_at, 1.0)}
