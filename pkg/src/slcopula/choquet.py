"""Mixtures of the extreme diagonals ``max(m t, t^2)``.

A probability measure on [0,1] selects a mixture of the extreme family; the
resulting diagonal is piecewise quadratic with breakpoints at the atoms, and
the measure can be read back from the quadratic coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import NotAMixtureError, SpecError

__all__ = [
    "DiscreteMeasure",
    "PiecewiseQuadratic",
    "mixture_diagonal",
    "mixture_copula",
    "to_piecewise",
    "recover_measure",
    "discretize",
]

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure on [0,1].

    ``atoms`` and ``weights`` are tuples sorted by atom, atoms distinct,
    weights strictly positive and summing to one.
    """

    atoms: tuple
    weights: tuple

    def __post_init__(self):
        atoms = tuple(float(m) for m in self.atoms)
        weights = tuple(float(c) for c in self.weights)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        if not atoms or len(atoms) != len(weights):
            raise SpecError("a measure needs matching, non-empty atoms and weights")
        if any(not 0.0 <= m <= 1.0 for m in atoms):
            raise SpecError(f"atoms must lie in [0,1]: {atoms}")
        if any(b <= a for a, b in zip(atoms, atoms[1:])):
            raise SpecError("atoms must be strictly increasing")
        if any(not c > 0.0 for c in weights):
            raise SpecError("weights must be strictly positive")
        if abs(sum(weights) - 1.0) > WEIGHT_SUM_TOL:
            raise SpecError(f"weights sum to {sum(weights)!r}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "DiscreteMeasure":
        """Sort ``(m, w)`` pairs, merge repeated atoms and drop zero weights."""
        merged: dict[float, float] = {}
        for m, w in pairs:
            merged[float(m)] = merged.get(float(m), 0.0) + float(w)
        items = sorted((m, w) for m, w in merged.items() if w != 0.0)
        if not items:
            raise SpecError("measure has no mass")
        return cls(tuple(m for m, _ in items), tuple(w for _, w in items))

    @classmethod
    def point_mass(cls, m: float) -> "DiscreteMeasure":
        return cls((m,), (1.0,))

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteMeasure":
        try:
            return cls.from_pairs((a["m"], a["w"]) for a in obj["atoms"])
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed measure JSON: {obj!r}") from exc

    def to_json(self) -> dict:
        return {"atoms": [{"m": m, "w": w} for m, w in zip(self.atoms, self.weights)]}

    def cdf(self, t):
        """``F(t) = mu([0, t])`` (right-continuous)."""
        t = np.asarray(t, dtype=float)
        a = np.asarray(self.atoms)
        c = np.asarray(self.weights)
        return np.sum(np.where(a <= t[..., None], c, 0.0), axis=-1)

    def tail_first_moment(self, t):
        """``int_{]t,1]} m dmu(m)``."""
        t = np.asarray(t, dtype=float)
        a = np.asarray(self.atoms)
        c = np.asarray(self.weights)
        return np.sum(np.where(a > t[..., None], c * a, 0.0), axis=-1)

    def expect(self, g: Callable) -> float:
        return float(sum(w * g(m) for m, w in zip(self.atoms, self.weights)))

    def __len__(self):
        return len(self.atoms)


def mixture_diagonal(mu: DiscreteMeasure, t):
    """Diagonal ``t^2 F(t) + t int_{]t,1]} m dmu`` of the mixture."""
    t = np.asarray(t, dtype=float)
    out = t * t * mu.cdf(t) + t * mu.tail_first_moment(t)
    return float(out) if out.ndim == 0 else out


def mixture_copula(mu: DiscreteMeasure, u, v):
    """Closed-form mixture copula ``(w F(w) + int_{]w,1]} m dmu) * min(u, v)``, ``w = max(u, v)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    hi = np.maximum(u, v)
    lo = np.minimum(u, v)
    out = (hi * mu.cdf(hi) + mu.tail_first_moment(hi)) * lo
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """``delta(x) = alpha[k] x + beta[k] x^2`` on ``[x_k, x_{k+1}]``.

    With breakpoints ``x_1 < ... < x_j`` there are ``j + 1`` pieces; piece 0
    covers ``[0, x_1]`` and the last piece covers ``[x_j, 1]``.  Breakpoints at
    0 or 1 give degenerate end pieces, which is how atoms at the ends of [0,1]
    are carried.
    """

    breakpoints: tuple
    alpha: tuple
    beta: tuple

    def __post_init__(self):
        for name in ("breakpoints", "alpha", "beta"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        j = len(self.breakpoints)
        if j == 0 or len(self.alpha) != j + 1 or len(self.beta) != j + 1:
            raise SpecError("need j breakpoints and j+1 coefficient pairs")
        bp = self.breakpoints
        if any(not 0.0 <= x <= 1.0 for x in bp) or any(b <= a for a, b in zip(bp, bp[1:])):
            raise SpecError(f"breakpoints must be strictly increasing in [0,1]: {bp}")

    def edges(self) -> list[float]:
        return [0.0, *self.breakpoints, 1.0]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(np.asarray(self.breakpoints), t, side="right")
        a = np.asarray(self.alpha)[k]
        b = np.asarray(self.beta)[k]
        out = a * t + b * t * t
        return float(out) if out.ndim == 0 else out

    def to_json(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "alpha": list(self.alpha),
                "beta": list(self.beta)}

    @classmethod
    def from_json(cls, obj: dict) -> "PiecewiseQuadratic":
        try:
            return cls(obj["breakpoints"], obj["alpha"], obj["beta"])
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed piecewise JSON: {obj!r}") from exc


def to_piecewise(mu: DiscreteMeasure) -> PiecewiseQuadratic:
    """Dense piecewise-quadratic form of the mixture diagonal.

    Piece ``h`` carries ``alpha_h = sum_{i>h} c_i m_i`` and
    ``beta_h = sum_{i<=h} c_i``.
    """
    c = np.asarray(mu.weights)
    m = np.asarray(mu.atoms)
    cm = c * m
    j = len(c)
    alpha = [float(cm[h:].sum()) for h in range(j)] + [0.0]
    beta = [0.0] + [float(c[:h].sum()) for h in range(1, j)] + [1.0]
    return PiecewiseQuadratic(tuple(m), tuple(alpha), tuple(beta))


def recover_measure(pw: PiecewiseQuadratic, tol: float = 1e-9) -> DiscreteMeasure:
    """Invert :func:`to_piecewise`: atoms at the breakpoints, weights from the
    increments of the quadratic coefficients.

    Raises
    ------
    NotAMixtureError
        If the coefficients are not those of a mixture (first piece not
        linear, last piece not ``x^2``, decreasing ``beta``, or ``alpha``
        increments inconsistent with the atoms).
    """
    a = np.asarray(pw.alpha)
    b = np.asarray(pw.beta)
    x = np.asarray(pw.breakpoints)
    if abs(b[0]) > tol or abs(a[-1]) > tol or abs(b[-1] - 1.0) > tol:
        raise NotAMixtureError("first piece must be linear and last piece x^2")
    dc = np.diff(b)
    if np.any(dc <= -tol):
        raise NotAMixtureError(f"quadratic coefficients decrease: {tuple(b)}")
    # alpha_{h-1} - alpha_h = c_h m_h
    if np.any(np.abs(-np.diff(a) - dc * x) > tol):
        raise NotAMixtureError("linear coefficients do not match atoms and weights")
    if np.any(a < -tol) or np.any(a > 1.0 + tol):
        raise NotAMixtureError("linear coefficients must lie in [0,1]")
    keep = dc > tol
    if not keep.any():
        raise NotAMixtureError("no positive weight found")
    weights = dc[keep]
    return DiscreteMeasure(tuple(x[keep]), tuple(weights / weights.sum()))


def discretize(ppf: Callable[[float], float], k: int) -> DiscreteMeasure:
    """Approximate a continuous measure by ``k`` equal atoms at quantile midpoints."""
    if k < 1:
        raise ValueError("k must be positive")
    pts = [min(1.0, max(0.0, float(ppf((i + 0.5) / k)))) for i in range(k)]
    return DiscreteMeasure.from_pairs((p, 1.0 / k) for p in pts)


def random_measure(rng: np.random.Generator, max_atoms: int = 8) -> DiscreteMeasure:
    """Random measure with 1..max_atoms atoms (test and demo helper)."""
    j = int(rng.integers(1, max_atoms + 1))
    atoms = np.sort(rng.random(j))
    w = rng.dirichlet(np.ones(j))
    # force an exact unit sum after the float division
    w[-1] = 1.0 - w[:-1].sum()
    return DiscreteMeasure.from_pairs(zip(atoms, w))

