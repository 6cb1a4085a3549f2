"""Semilinear copulas, quasi-copulas and semi-copulas built from a diagonal.

``C(u, v) = min(u, v) * delta(max(u, v)) / max(u, v)`` with ``C(0, 0) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagonal import DiagonalSpec, validate
from .errors import DomainError, PreconditionError
from .numerics import GridMap, Tolerance

__all__ = [
    "SemilinearObject",
    "from_spec",
    "evaluate",
    "volume",
    "survival",
    "positivity_oracle",
    "PositivityReport",
    "surface_grid",
    "sample",
]

CLASSES = ("copula", "quasicopula", "semicopula")


def _square(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    for a in (u, v):
        if np.any(np.isnan(a)) or np.any(a < 0.0) or np.any(a > 1.0):
            raise DomainError("arguments must lie in the unit square")
    return u, v


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class SemilinearObject:
    """A diagonal together with the class it was validated into."""

    diag: DiagonalSpec
    declared_class: str

    def __post_init__(self):
        if self.declared_class not in CLASSES:
            raise ValueError(f"declared_class must be one of {CLASSES}")

    def __call__(self, u, v):
        return evaluate(self, u, v)

    def _eval(self, u, v):
        hi = np.maximum(u, v)
        lo = np.minimum(u, v)
        return lo * self.diag._ratio(hi)


def from_spec(spec: DiagonalSpec, tol: Tolerance | None = None) -> SemilinearObject:
    """Validate ``spec`` and wrap it with the strongest class it belongs to.

    Raises
    ------
    PreconditionError
        If the spec generates no semilinear semi-copula at all.
    """
    cls = validate(spec, tol).declared_class
    if cls is None:
        raise PreconditionError("spec does not generate a semilinear semi-copula")
    return SemilinearObject(spec, cls)


def evaluate(obj: SemilinearObject, u, v):
    u, v = _square(u, v)
    return _out(obj._eval(u, v))


def volume(obj: SemilinearObject, u1, u2, v1, v2) -> float:
    """C-volume of ``[u1, u2] x [v1, v2]``."""
    if not (0.0 <= u1 <= u2 <= 1.0 and 0.0 <= v1 <= v2 <= 1.0):
        raise DomainError(f"bad rectangle [{u1},{u2}]x[{v1},{v2}]")
    if u1 == u2 or v1 == v2:
        return 0.0
    C = obj._eval
    return float(C(u2, v2) - C(u1, v2) - C(u2, v1) + C(u1, v1))


def survival(obj: SemilinearObject, u, v):
    u, v = _square(u, v)
    return _out(u + v - 1.0 + obj._eval(1.0 - u, 1.0 - v))


def surface_grid(obj: SemilinearObject, n: int) -> GridMap:
    g = np.arange(n + 1) / n
    U, V = np.meshgrid(g, g, indexing="ij")
    return GridMap(n, obj._eval(U, V), "surface")


@dataclass(frozen=True)
class PositivityReport:
    n: int
    min_volume: float
    argmin_cell: tuple
    negative_mass_total: float
    volumes: GridMap

    def to_json(self) -> dict:
        i, j = self.argmin_cell
        return {"n": self.n, "min_volume": self.min_volume,
                "argmin_cell": {"i": i, "j": j,
                                "u": [i / self.n, (i + 1) / self.n],
                                "v": [j / self.n, (j + 1) / self.n]},
                "negative_mass_total": self.negative_mass_total}


def positivity_oracle(obj: SemilinearObject, n: int = 200) -> PositivityReport:
    """Brute-force 2-increasingness check over all ``n^2`` grid cells."""
    if n < 2:
        raise ValueError("n must be at least 2")
    C = surface_grid(obj, n).values
    vol = C[1:, 1:] - C[:-1, 1:] - C[1:, :-1] + C[:-1, :-1]
    k = np.unravel_index(np.argmin(vol), vol.shape)
    neg = float(vol[vol < 0].sum())
    return PositivityReport(n, float(vol[k]), (int(k[0]), int(k[1])), neg,
                            GridMap(n, vol, "cell_volume"))


# --------------------------------------------------------------------------
# sampling by the conditional-distribution method
#
# Given U = u the conditional cdf of V is
#   v * phi'(u)       for v < u      (phi = delta / t)
#   phi(v)            for v >= u
# with a jump of phi(u) - u phi'(u) at v = u.

def _phi_slope(diag: DiagonalSpec, u: np.ndarray) -> np.ndarray:
    d = diag._value(u)
    ds = diag._slope(u)
    return (ds * u - d) / (u * u)


def _invert_ratio(diag: DiagonalSpec, w, lo, xtol=1e-10):
    """Smallest ``v`` in ``[lo, 1]`` with ``phi(v) >= w`` (vectorized bisection)."""
    a = lo.copy()
    b = np.ones_like(lo)
    iters = int(np.ceil(np.log2(1.0 / xtol))) + 1
    for _ in range(iters):
        mid = 0.5 * (a + b)
        ok = diag._ratio(mid) >= w
        b = np.where(ok, mid, b)
        a = np.where(ok, a, mid)
    return b


def sample(obj: SemilinearObject, count: int, seed: int = 0) -> np.ndarray:
    """Draw ``count`` pairs from a semilinear copula; shape ``(count, 2)``.

    Deterministic for a fixed ``seed``.
    """
    if obj.declared_class != "copula":
        raise PreconditionError("sampling needs a copula-class object")
    if count < 0:
        raise ValueError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    w = rng.random(count)
    # u = 0 has probability zero but would break the slope formula
    u = np.where(u > 0, u, np.finfo(float).tiny)
    diag = obj.diag
    slope = np.maximum(_phi_slope(diag, u), 0.0)
    below = u * slope
    at = diag._ratio(u)
    v = np.empty(count)
    lower = w < below
    v[lower] = w[lower] / slope[lower]
    jump = ~lower & (w <= at)
    v[jump] = u[jump]
    upper = ~lower & ~jump
    if np.any(upper):
        v[upper] = _invert_ratio(diag, w[upper], u[upper])
    return np.column_stack([u, v])
