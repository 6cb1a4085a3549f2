"""Semilinear copulas, quasi-copulas and semi-copulas from diagonal sections."""

from .choquet import DiscreteMeasure, PiecewiseQuadratic
from .diagonal import (
    Blend,
    FamilyBeta,
    FamilyM,
    FamilyP,
    Mixture,
    Reflected,
    StepLeft,
    StepRight,
    Tabulated,
    identity,
    product,
    spec_from_json,
    validate,
)
from .numerics import GridMap, Tolerance
from .semilinear import SemilinearObject, from_spec

__version__ = "0.1.0"
