"""Diagonal sections: finite representations, evaluation and class membership.

Every variant is an immutable dataclass exposing vectorized ``__call__``
(the diagonal), ``ratio`` (``delta(t)/t``), ``deriv`` and its declared
``kinks``.  :func:`validate` decides membership in the diagonal set and in the
diagonal classes that generate semilinear copulas, quasi-copulas and
semi-copulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .choquet import DiscreteMeasure, mixture_diagonal
from .errors import DomainError, KinkError, SpecError
from .numerics import Tolerance

__all__ = [
    "DiagonalSpec",
    "FamilyM",
    "FamilyP",
    "FamilyBeta",
    "StepRight",
    "StepLeft",
    "Mixture",
    "Tabulated",
    "Reflected",
    "Blend",
    "identity",
    "product",
    "evaluate",
    "deriv",
    "reflect",
    "validate",
    "ClassReport",
    "Witness",
    "spec_from_json",
    "spec_to_json",
]


def _as_array(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0.0) or np.any(t > 1.0):
        raise DomainError("diagonal arguments must lie in [0,1]")
    return t


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _safe_div(a, t):
    return np.where(t > 0, a / np.where(t > 0, t, 1.0), 0.0)


class DiagonalSpec:
    """Interface shared by all diagonal representations.

    Subclasses implement ``_value``, ``_slope`` (right derivative at kinks)
    and ``kinks``; ``_ratio`` may be overridden by an exact closed form.
    """

    def __call__(self, t):
        return _out(self._value(_as_array(t)))

    def ratio(self, t):
        """``delta(t)/t`` with the value 0 at ``t = 0``."""
        return _out(self._ratio(_as_array(t)))

    def deriv(self, t):
        t = _as_array(t)
        hit = np.isin(t, np.asarray(self.kinks))
        if np.any(hit):
            loc = float(np.ravel(t)[np.argmax(np.ravel(hit))])
            raise KinkError(f"{type(self).__name__} has a kink at t={loc}", loc)
        return _out(self._slope(t))

    def _ratio(self, t):
        return _safe_div(self._value(t), t)

    @property
    def kinks(self) -> tuple:
        return ()

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FamilyM(DiagonalSpec):
    """``max(m t, t^2)``; ``m = 0`` is the product copula, ``m = 1`` is ``M``."""

    m: float

    def __post_init__(self):
        if not 0.0 <= self.m <= 1.0:
            raise SpecError(f"m must lie in [0,1], got {self.m}")

    def _value(self, t):
        return np.maximum(self.m * t, t * t)

    def _ratio(self, t):
        return np.where(t > 0, np.maximum(self.m, t), 0.0)

    def _slope(self, t):
        return np.where(t < self.m, self.m, 2.0 * t)

    @property
    def kinks(self):
        return (self.m,) if 0.0 < self.m < 1.0 else ()

    def to_json(self):
        return {"variant": "m", "m": self.m}


@dataclass(frozen=True)
class FamilyP(DiagonalSpec):
    """``min(t^2/p, t)`` for ``p`` in ]0,1]."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise SpecError(f"p must lie in ]0,1], got {self.p}")

    def _value(self, t):
        return np.minimum(t * t / self.p, t)

    def _ratio(self, t):
        return np.minimum(t / self.p, 1.0) * (t > 0)

    def _slope(self, t):
        return np.where(t < self.p, 2.0 * t / self.p, 1.0)

    @property
    def kinks(self):
        return (self.p,) if self.p < 1.0 else ()

    def to_json(self):
        return {"variant": "p", "p": self.p}


@dataclass(frozen=True)
class FamilyBeta(DiagonalSpec):
    """``beta t`` below ``exp(beta - 1)``, ``t + t ln t`` above.

    These generate extreme semilinear quasi-copulas that are not copulas.
    """

    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise SpecError(f"beta must lie in [0,1[, got {self.beta}")

    @property
    def breakpoint(self) -> float:
        return math.exp(self.beta - 1.0)

    def _ratio(self, t):
        logt = np.log(np.where(t > 0, t, 1.0))
        return np.where(t < self.breakpoint, self.beta, 1.0 + logt) * (t > 0)

    def _value(self, t):
        return t * self._ratio(t)

    def _slope(self, t):
        logt = np.log(np.where(t > 0, t, 1.0))
        return np.where(t < self.breakpoint, self.beta, 2.0 + logt)

    @property
    def kinks(self):
        return (self.breakpoint,)

    def to_json(self):
        return {"variant": "beta", "beta": self.beta}


@dataclass(frozen=True)
class StepRight(DiagonalSpec):
    """0 on ``[0, a[`` and ``t`` on ``[a, 1]`` (so ``delta(a) = a``)."""

    a: float

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise SpecError(f"a must lie in [0,1], got {self.a}")

    def _ratio(self, t):
        return ((t >= self.a) & (t > 0)).astype(float)

    def _value(self, t):
        return np.where(t >= self.a, t, 0.0)

    def _slope(self, t):
        return np.where(t >= self.a, 1.0, 0.0)

    @property
    def kinks(self):
        return (self.a,) if self.a > 0.0 else ()

    def to_json(self):
        return {"variant": "step", "side": "right", "a": self.a}


@dataclass(frozen=True)
class StepLeft(DiagonalSpec):
    """0 on ``[0, a]`` and ``t`` on ``]a, 1]`` (so ``delta(a) = 0``).

    ``a = 1`` is rejected: it would give ``delta(1) = 0``.
    """

    a: float

    def __post_init__(self):
        if not 0.0 <= self.a < 1.0:
            raise SpecError(f"a must lie in [0,1[, got {self.a}")

    def _ratio(self, t):
        return (t > self.a).astype(float)

    def _value(self, t):
        return np.where(t > self.a, t, 0.0)

    def _slope(self, t):
        return np.where(t >= self.a, 1.0, 0.0)

    @property
    def kinks(self):
        return (self.a,) if self.a > 0.0 else ()

    def to_json(self):
        return {"variant": "step", "side": "left", "a": self.a}


@dataclass(frozen=True)
class Mixture(DiagonalSpec):
    """Mixture of ``max(m t, t^2)`` over a discrete measure on ``m``."""

    measure: DiscreteMeasure

    def _value(self, t):
        return np.asarray(mixture_diagonal(self.measure, t))

    def _ratio(self, t):
        mu = self.measure
        return np.where(t > 0, t * mu.cdf(t) + mu.tail_first_moment(t), 0.0)

    def _slope(self, t):
        mu = self.measure
        return 2.0 * t * mu.cdf(t) + mu.tail_first_moment(t)

    @property
    def kinks(self):
        return tuple(m for m in self.measure.atoms if 0.0 < m < 1.0)

    def to_json(self):
        return {"variant": "mixture", **self.measure.to_json()}


@dataclass(frozen=True)
class Tabulated(DiagonalSpec):
    """Piecewise-linear interpolation of knots ``(x, y)``.

    Knots must have strictly increasing ``x`` and cover [0,1]; whether the
    ``y`` values make a diagonal is left to :func:`validate`.
    """

    knots: tuple

    def __post_init__(self):
        try:
            knots = tuple((float(x), float(y)) for x, y in self.knots)
        except (TypeError, ValueError) as exc:
            raise SpecError(f"knots must be (x, y) pairs: {self.knots!r}") from exc
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise SpecError("need at least two knots")
        xs = [x for x, _ in knots]
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise SpecError("knots must start at x=0 and end at x=1")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise SpecError("knot abscissae must be strictly increasing")
        if any(not math.isfinite(y) for _, y in knots):
            raise SpecError("knot ordinates must be finite")

    @property
    def xs(self):
        return np.array([x for x, _ in self.knots])

    @property
    def ys(self):
        return np.array([y for _, y in self.knots])

    def _value(self, t):
        return np.interp(t, self.xs, self.ys)

    def _slope(self, t):
        xs, ys = self.xs, self.ys
        k = np.clip(np.searchsorted(xs, t, side="right") - 1, 0, len(xs) - 2)
        return (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])

    @property
    def kinks(self):
        return tuple(x for x, _ in self.knots[1:-1])

    def to_json(self):
        return {"variant": "tabulated", "knots": [list(k) for k in self.knots]}


@dataclass(frozen=True)
class Reflected(DiagonalSpec):
    """``inner(1 - t) + 2t - 1``: maps upper-semilinear diagonals to lower ones."""

    inner: DiagonalSpec

    def _value(self, t):
        return self.inner._value(1.0 - t) + 2.0 * t - 1.0

    def _slope(self, t):
        return 2.0 - self.inner._slope(1.0 - t)

    @property
    def kinks(self):
        return tuple(sorted(1.0 - k for k in self.inner.kinks))

    def to_json(self):
        return {"variant": "reflected", "inner": self.inner.to_json()}


@dataclass(frozen=True)
class Blend(DiagonalSpec):
    """Finite convex combination of arbitrary diagonal specs."""

    parts: tuple
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.parts or len(self.parts) != len(self.weights):
            raise SpecError("blend needs matching, non-empty parts and weights")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise SpecError("blend weights must be nonnegative and sum to 1")

    def _value(self, t):
        return sum(w * p._value(t) for p, w in zip(self.parts, self.weights))

    def _ratio(self, t):
        return sum(w * p._ratio(t) for p, w in zip(self.parts, self.weights))

    def _slope(self, t):
        return sum(w * p._slope(t) for p, w in zip(self.parts, self.weights))

    @property
    def kinks(self):
        return tuple(sorted({k for p in self.parts for k in p.kinks}))

    def to_json(self):
        return {"variant": "blend",
                "parts": [{"w": w, "spec": p.to_json()}
                          for p, w in zip(self.parts, self.weights)]}


def identity() -> FamilyM:
    """``delta(t) = t``, the diagonal of ``M``."""
    return FamilyM(1.0)


def product() -> FamilyM:
    """``delta(t) = t^2``, the diagonal of the product copula."""
    return FamilyM(0.0)


def evaluate(spec: DiagonalSpec, t):
    return spec(t)


def deriv(spec: DiagonalSpec, t):
    """Derivative away from declared kinks; raises :class:`KinkError` on one."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0) or np.any(t_arr >= 1.0):
        raise DomainError("deriv needs t in ]0,1[")
    return spec.deriv(t)


def reflect(spec: DiagonalSpec) -> Reflected:
    return Reflected(spec)


# --------------------------------------------------------------------------
# JSON

def spec_from_json(obj) -> DiagonalSpec:
    """Parse the JSON description used by the CLI."""
    if not isinstance(obj, dict) or "variant" not in obj:
        raise SpecError(f"spec must be an object with a 'variant' key: {obj!r}")
    kind = obj["variant"]
    try:
        if kind == "m":
            return FamilyM(float(obj["m"]))
        if kind == "p":
            return FamilyP(float(obj["p"]))
        if kind == "beta":
            return FamilyBeta(float(obj["beta"]))
        if kind == "step":
            side = obj.get("side", "right")
            if side == "right":
                return StepRight(float(obj["a"]))
            if side == "left":
                return StepLeft(float(obj["a"]))
            raise SpecError(f"step side must be 'left' or 'right', got {side!r}")
        if kind == "mixture":
            return Mixture(DiscreteMeasure.from_json(obj))
        if kind == "tabulated":
            return Tabulated(tuple(tuple(k) for k in obj["knots"]))
        if kind == "reflected":
            return Reflected(spec_from_json(obj["inner"]))
        if kind == "blend":
            parts = obj["parts"]
            return Blend(tuple(spec_from_json(p["spec"]) for p in parts),
                         tuple(float(p["w"]) for p in parts))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"malformed {kind!r} spec: {obj!r}") from exc
    raise SpecError(f"unknown variant {kind!r}")


def spec_to_json(spec: DiagonalSpec) -> dict:
    return spec.to_json()


# --------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Witness:
    """Worst violation of one condition: location, condition name, size."""

    where: float | tuple
    condition: str
    magnitude: float

    def to_json(self):
        where = list(self.where) if isinstance(self.where, tuple) else self.where
        return {"where": where, "condition": self.condition, "magnitude": self.magnitude}


@dataclass
class ClassReport:
    d1: bool
    d2: bool
    d3: bool
    d4: bool
    phi_nondecreasing: bool
    eta_nonincreasing: bool
    slope_cap: bool
    envelope_ok: bool
    witnesses: list = field(default_factory=list)

    @property
    def is_diagonal(self) -> bool:
        return self.d1 and self.d2 and self.d3 and self.d4

    @property
    def two_lipschitz(self) -> bool:
        return self.d4

    @property
    def in_copula_class(self) -> bool:
        return self.is_diagonal and self.phi_nondecreasing and self.eta_nonincreasing

    @property
    def in_quasicopula_class(self) -> bool:
        return (self.is_diagonal and self.phi_nondecreasing and self.slope_cap
                and self.envelope_ok)

    @property
    def in_semicopula_class(self) -> bool:
        return self.d1 and self.d2 and self.d3 and self.phi_nondecreasing

    @property
    def declared_class(self) -> str | None:
        if self.in_copula_class:
            return "copula"
        if self.in_quasicopula_class:
            return "quasicopula"
        if self.in_semicopula_class:
            return "semicopula"
        return None

    def to_json(self) -> dict:
        return {
            "is_diagonal": self.is_diagonal,
            "diagonal_conditions": {"D1": self.d1, "D2": self.d2, "D3": self.d3, "D4": self.d4},
            "in_copula_class": self.in_copula_class,
            "copula_conditions": {"phi_nondecreasing": self.phi_nondecreasing,
                                  "eta_nonincreasing": self.eta_nonincreasing},
            "in_semicopula_class": self.in_semicopula_class,
            "in_quasicopula_class": self.in_quasicopula_class,
            "quasicopula_conditions": {"two_lipschitz": self.two_lipschitz,
                                       "phi_nondecreasing": self.phi_nondecreasing,
                                       "slope_cap": self.slope_cap,
                                       "envelope_ok": self.envelope_ok},
            "witnesses": [w.to_json() for w in self.witnesses],
        }


_GRID_FLOOR = 1e-9


def validation_grid(spec: DiagonalSpec, n: int) -> np.ndarray:
    """``k/n`` for ``k = 0..n`` merged with knots and kinks of the spec."""
    extra = [np.asarray(spec.kinks, dtype=float)]
    if isinstance(spec, Tabulated):
        extra.append(spec.xs)
    extra = np.concatenate(extra)
    # kinks next to the origin only add rounding noise (subnormal ratios)
    extra = extra[extra >= _GRID_FLOOR]
    return np.unique(np.concatenate([np.arange(n + 1) / n, extra]))


def _worst(mask_vals, where, name, witnesses):
    """Record the largest positive entry of ``mask_vals`` as a witness."""
    if mask_vals.size and np.max(mask_vals) > 0:
        k = int(np.argmax(mask_vals))
        loc = where(k)
        witnesses.append(Witness(loc, name, float(mask_vals[k])))
        return False
    return True


def _secant_excess(x, phi, eps, chunk=512):
    """Largest ``x1 (phi(x2) - phi(x1)) - (x2 - x1)`` over pairs ``x1 < x2``."""
    best, where = -np.inf, (0.0, 0.0)
    n = len(x)
    for s in range(0, n, chunk):
        x1 = x[s:s + chunk, None]
        p1 = phi[s:s + chunk, None]
        d = x1 * (phi[None, :] - p1) - (x[None, :] - x1)
        upper = x[None, :] > x1
        d = np.where(upper, d, -np.inf)
        k = np.unravel_index(np.argmax(d), d.shape)
        if d[k] > best:
            best = float(d[k])
            where = (float(x1[k[0], 0]), float(x[k[1]]))
    return best - eps, where


def validate(spec: DiagonalSpec, tol: Tolerance | None = None) -> ClassReport:
    """Membership of ``spec`` in the diagonal classes.

    All conditions are checked on the validation grid with slack
    ``tol.eps_mono``.  ``phi = delta/x`` must be nondecreasing for every class;
    ``eta = delta/x^2`` nonincreasing for copulas; the quasi-copula slope cap is
    checked in secant form over all grid pairs together with the lower envelope
    ``x + x ln x``.
    """
    tol = tol or Tolerance()
    eps = tol.eps_mono
    t = validation_grid(spec, tol.grid_n)
    d = np.asarray(spec(t))
    if not np.all(np.isfinite(d)):
        raise SpecError("diagonal evaluates to non-finite values")
    w: list[Witness] = []

    ends = np.array([abs(d[0] - 0.0), abs(d[-1] - 1.0)])
    d1 = _worst(ends - eps, lambda k: float(t[[0, -1][k]]), "D1", w)
    dd = np.diff(d)
    dt = np.diff(t)
    d2 = _worst(-dd - eps, lambda k: float(t[k]), "D2", w)
    lower = np.maximum(0.0 - d, d - t)
    d3 = _worst(lower - eps, lambda k: float(t[k]), "D3", w)
    d4 = _worst(np.abs(dd) - 2.0 * dt - eps, lambda k: float(t[k]), "D4", w)

    pos = t > 0
    x = t[pos]
    phi = np.asarray(spec.ratio(x))
    phi_ok = _worst(-np.diff(phi) - eps, lambda k: float(x[k]), "phi_nondecreasing", w)
    eta = phi / x
    scale = np.maximum(1.0, np.abs(eta[:-1]))
    eta_ok = _worst(np.diff(eta) - eps * scale, lambda k: float(x[k]),
                    "eta_nonincreasing", w)

    excess, pair = _secant_excess(x, phi, eps)
    slope_ok = excess <= 0
    if not slope_ok:
        w.append(Witness(pair, "slope_cap", float(excess)))
    env = x + x * np.log(x)
    env_ok = _worst(env - d[pos] - eps, lambda k: float(x[k]), "envelope", w)

    return ClassReport(d1, d2, d3, d4, phi_ok, eta_ok, slope_ok, env_ok, w)
