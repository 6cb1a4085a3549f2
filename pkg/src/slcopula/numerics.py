"""Shared numerical kernel.

Composite Simpson quadrature with a fixed panel count, central finite
differences with one-sided fallbacks, and deterministic grid estimates of the
Lebesgue measure of predicate sets on ]0,1].  Everything here is pure and
reproducible bit for bit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, NumericalDomainError

__all__ = [
    "Tolerance",
    "GridMap",
    "integrate_1d",
    "simpson_rule",
    "derivative",
    "estimate_measure",
    "format_number",
]

GRID_KINDS = ("surface", "cell_volume", "asymmetry")


@dataclass(frozen=True)
class Tolerance:
    """Numerical knobs used by validation, classification and quadrature.

    Parameters
    ----------
    eps_mono : float
        Slack for monotonicity and inequality checks.
    eps_measure : float
        Threshold below which an estimated measure counts as zero.
    h_diff : float
        Finite-difference step.
    quad_n : int
        Composite Simpson panel count for 1D integrals (even).
    quad_n_2d : int
        Panel count per axis for iterated 2D integrals (even).
    grid_n : int
        Resolution of the validation grid ``k/grid_n``.
    measure_n : int
        Number of midpoints ``(k - 1/2)/measure_n`` used for measure estimates.
    ratio_slack : float
        Slack on the ratio comparisons of the extremity criteria.
    origin_eps : float
        Criteria are evaluated on ``]origin_eps, 1]`` only.
    """

    eps_mono: float = 1e-9
    eps_measure: float = 1e-3
    h_diff: float = 1e-6
    quad_n: int = 2048
    quad_n_2d: int = 512
    grid_n: int = 1000
    measure_n: int = 10_000
    ratio_slack: float = 1e-6
    origin_eps: float = 1e-4

    def __post_init__(self):
        for name in ("eps_mono", "eps_measure", "h_diff", "ratio_slack", "origin_eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("quad_n", "quad_n_2d"):
            n = getattr(self, name)
            if n <= 0 or n % 2:
                raise ValueError(f"{name} must be a positive even integer, got {n}")
        if self.grid_n < 2 or self.measure_n < 1:
            raise ValueError("grid_n must be >= 2 and measure_n >= 1")

    def with_overrides(self, **kw) -> "Tolerance":
        fields_ = {k: v for k, v in kw.items() if v is not None}
        return type(self)(**{**self.__dict__, **fields_})


@dataclass(frozen=True)
class GridMap:
    """Values over a uniform grid of the unit square.

    ``surface`` and ``asymmetry`` maps live on the ``(n+1) x (n+1)`` nodes
    ``(i/n, j/n)``; ``cell_volume`` maps live on the ``n x n`` cells and are
    located at the cell centres.  ``values[i, j]`` belongs to ``u`` index ``i``
    and ``v`` index ``j``.
    """

    n: int
    values: np.ndarray
    kind: str = "surface"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in GRID_KINDS:
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        expected = self.n if self.kind == "cell_volume" else self.n + 1
        if self.values.shape != (expected, expected):
            raise ValueError(
                f"{self.kind} grid with n={self.n} needs shape "
                f"{(expected, expected)}, got {self.values.shape}")
        for name, arr in self.extra.items():
            if np.shape(arr) != self.values.shape:
                raise ValueError(f"companion column {name!r} has the wrong shape")

    @property
    def axis(self) -> np.ndarray:
        if self.kind == "cell_volume":
            return (np.arange(self.n) + 0.5) / self.n
        return np.arange(self.n + 1) / self.n

    def to_csv(self, header_comment: str | None = None) -> str:
        """Render as CSV ``u,v,value[,extra...]``, row-major, 17 significant digits."""
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        writer = csv.writer(buf, lineterminator="\n")
        names = list(self.extra)
        writer.writerow(["u", "v", "value", *names])
        ax = self.axis
        cols = [self.values] + [np.asarray(self.extra[k]) for k in names]
        for i, u in enumerate(ax):
            for j, v in enumerate(ax):
                writer.writerow([format_number(u), format_number(v),
                                 *(format_number(c[i, j]) for c in cols)])
        return buf.getvalue()


def format_number(x) -> str:
    return "%.17g" % float(x)


def _call_vectorized(f, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
    except (TypeError, ValueError):
        y = None
    if y is None or y.shape != x.shape:
        y = np.array([float(f(float(t))) for t in x])
    return y


def simpson_rule(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite Simpson rule with ``n`` panels."""
    if n <= 0 or n % 2:
        raise ValueError(f"panel count must be a positive even integer, got {n}")
    x = np.linspace(a, b, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (b - a) / (3.0 * n)
    return x, w


def integrate_1d(f: Callable, a: float, b: float, n: int = 2048,
                 breaks: Iterable[float] = ()) -> float:
    """Composite Simpson estimate of the integral of ``f`` over ``[a, b]``.

    ``f`` may be vectorized or scalar.  Points in ``breaks`` that fall strictly
    inside ``]a, b[`` split the interval; each piece receives an even share of
    the ``n`` panels proportional to its length (at least two), so integrands
    that are smooth between the breaks keep their full order of accuracy.

    Raises
    ------
    NumericalDomainError
        If ``f`` returns a non-finite value; the offending abscissa is attached.
    """
    if not a <= b:
        raise DomainError(f"integration bounds out of order: a={a}, b={b}")
    if n <= 0 or n % 2:
        raise ValueError(f"panel count must be a positive even integer, got {n}")
    if a == b:
        return 0.0
    cuts = sorted({float(t) for t in breaks if a < t < b})
    edges = [a, *cuts, b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        k = max(2, 2 * int(round(0.5 * n * (hi - lo) / (b - a))))
        x, w = simpson_rule(lo, hi, k)
        y = _call_vectorized(f, x)
        bad = ~np.isfinite(y)
        if bad.any():
            x0 = float(x[np.argmax(bad)])
            raise NumericalDomainError(f"integrand is not finite at x={x0!r}", x0)
        total += float(np.dot(w, y))
    return total


def derivative(f: Callable[[float], float], x: float, h: float = 1e-6,
               kinks: Sequence[float] = ()) -> float:
    """Central difference ``(f(x+h) - f(x-h)) / 2h`` on ``[0, 1]``.

    If a declared kink lies inside ``[x-h, x+h]`` the difference is taken
    one-sided, on the side away from the kink.  Close to the origin the step
    shrinks to ``x/4``.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"derivative needs x in ]0,1[, got {x}")
    if h >= min(x, 1.0 - x):
        h = min(x, 1.0 - x) / 4.0
    near = [k for k in kinks if abs(k - x) <= h]
    if not near:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    k = near[0]
    if k > x or (k == x and x + h > 1.0):
        lo, hi = x - h, x
    else:
        lo, hi = x, x + h
    if lo < 0.0 or hi > 1.0:
        raise DomainError(f"finite difference at x={x} leaves [0,1]")
    return (f(hi) - f(lo)) / (hi - lo)


def estimate_measure(pred: Callable, n: int = 10_000) -> float:
    """Fraction of the midpoints ``(k - 1/2)/n`` of ]0,1[ satisfying ``pred``.

    ``pred`` may be vectorized (array in, boolean array out) or scalar.
    Exceptions raised by ``pred`` propagate.
    """
    if n < 1:
        raise ValueError("n must be positive")
    x = (np.arange(1, n + 1) - 0.5) / n
    try:
        mask = np.asarray(pred(x))
    except (TypeError, ValueError):
        mask = None
    if mask is None or mask.shape != x.shape:
        mask = np.array([bool(pred(float(t))) for t in x])
    return float(np.count_nonzero(mask)) / n
