import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from slcopula import asymmetry as asy
from slcopula import choquet as ch
from slcopula import diagonal as dg
from slcopula.choquet import DiscreteMeasure
from slcopula.numerics import Tolerance
from slcopula.semilinear import SemilinearObject

unit = st.floats(0, 1, allow_nan=False)
interior = st.floats(0.001, 0.999, allow_nan=False)


@st.composite
def measures(draw):
    k = draw(st.integers(1, 6))
    atoms = draw(st.lists(unit, min_size=k, max_size=k, unique=True))
    raw = np.array(draw(st.lists(st.floats(0.05, 1), min_size=k, max_size=k)))
    w = raw / raw.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return DiscreteMeasure.from_pairs(zip(atoms, w))


@given(measures(), unit, unit)
def test_mixture_copula_between_product_and_minimum(mu, u, v):
    c = ch.mixture_copula(mu, u, v)
    assert u * v - 1e-12 <= c <= min(u, v) + 1e-12


@given(measures())
@settings(max_examples=40, deadline=None)
def test_piecewise_round_trip(mu):
    got = ch.recover_measure(ch.to_piecewise(mu))
    assert_allclose(got.atoms, mu.atoms, atol=1e-10)
    assert_allclose(got.weights, mu.weights, atol=1e-10)


@given(measures(), interior, interior)
def test_chi_sandwich(mu, u, v):
    o = SemilinearObject(dg.Mixture(mu), "copula")
    b = asy.bounds(u, v)
    c = asy.chi(o, u, v)
    assert b.lower - 1e-12 <= c <= b.upper + 1e-12
    assert asy.xi(o, u, v) <= b.radial_upper + 1e-12


@given(st.floats(0.01, 1), unit)
def test_reflect_involution(p, t):
    s = dg.FamilyP(p)
    assert abs(dg.reflect(dg.reflect(s))(t) - s(t)) <= 1e-14


@given(unit, unit, unit)
def test_exchangeable(m, u, v):
    o = SemilinearObject(dg.FamilyM(m), "copula")
    assert o(u, v) == o(v, u)


@given(measures(), measures(), unit)
@settings(deadline=None)
def test_blend_of_mixtures_is_copula(a, b, w):
    spec = dg.Blend((dg.Mixture(a), dg.Mixture(b)), (w, 1 - w))
    assert dg.validate(spec, Tolerance(grid_n=200)).in_copula_class
