import numpy as np
import pytest
from numpy.testing import assert_allclose

from slcopula import asymmetry as asy
from slcopula import choquet as ch
from slcopula import diagonal as dg
from slcopula.semilinear import SemilinearObject


def cop(spec):
    return SemilinearObject(spec, "copula")


PI = cop(dg.product())
M = cop(dg.identity())
G = np.linspace(0, 1, 101)
U, V = np.meshgrid(G, G, indexing="ij")


class TestFunctionals:
    def test_chi(self):
        assert asy.chi(PI, 0.3, 0.2) == pytest.approx(0.5, abs=1e-15)
        assert asy.chi(cop(dg.FamilyM(0.8)), 0.3, 0.2) == pytest.approx(0.4, abs=1e-15)
        assert asy.chi(cop(dg.FamilyP(0.8)), 0.3, 0.2) == pytest.approx(0.625, abs=1e-15)

    def test_varrho(self):
        assert asy.varrho(cop(dg.FamilyM(0.3)), 0.5, 0.5) == 0
        assert asy.varrho(PI, 0.3, 0.2) == pytest.approx(0.5, abs=1e-15)
        assert asy.varrho(M, 0.3, 0.2) == pytest.approx(0.5, abs=1e-15)

    def test_xi(self):
        assert np.all(np.abs(asy.xi(PI, U, V)) <= 1e-15)
        assert np.all(np.abs(asy.xi(M, U, V)) <= 1e-15)
        assert asy.xi(cop(dg.FamilyP(0.8)), 0.3, 0.2) == pytest.approx(0.125, abs=1e-15)

    def test_chi_in_lower_triangle(self):
        o = cop(dg.FamilyM(0.4))
        assert asy.chi(o, 0.3, 0.2) == pytest.approx(o(0.8, 0.7) - o(0.3, 0.2))

    def test_nonnegative_and_symmetric(self, rng):
        for _ in range(10):
            o = cop(dg.Mixture(ch.random_measure(rng)))
            for f in (asy.chi, asy.varrho, asy.xi):
                vals = f(o, U, V)
                assert np.all(vals >= -1e-15)
            assert_allclose(asy.chi(o, U, V), asy.chi(o, V, U), atol=1e-15)


class TestBounds:
    def test_example(self):
        b = asy.bounds(0.3, 0.2)
        assert (b.lower, b.upper, b.radial_upper) == pytest.approx((0.4, 0.625, 0.125))

    def test_antidiagonal_and_centre(self):
        t = np.linspace(0, 1, 21)
        b = asy.bounds(t, 1 - t)
        for arr in (b.lower, b.upper, b.radial_upper):
            assert np.all(arr == 0)

    def test_order_and_symmetry(self):
        b = asy.bounds(U, V)
        assert np.all(b.lower <= b.upper + 1e-15)
        bt = asy.bounds(V, U)
        for x, y in ((b.lower, bt.lower), (b.upper, bt.upper), (b.radial_upper, bt.radial_upper)):
            assert_allclose(x, y, atol=1e-15)

    def test_boundary_equals_chi_everywhere(self, rng):
        # on the edges chi is the same for every copula, so lower = upper there
        edge = np.linspace(0, 1, 51)
        for u, v in ((edge, 0 * edge), (0 * edge, edge), (edge, 0 * edge + 1)):
            b = asy.bounds(u, v)
            assert_allclose(b.lower, b.upper, atol=1e-15)
            assert_allclose(b.radial_upper, 0, atol=1e-15)
            o = cop(dg.Mixture(ch.random_measure(rng)))
            assert_allclose(asy.chi(o, u, v), b.lower, atol=1e-15)

    def test_corner(self):
        b = asy.bounds(1.0, 1.0)
        assert b.upper == 1.0 and b.radial_upper == 0.0

    def test_chi_sandwich(self, rng):
        for _ in range(20):
            o = cop(dg.Mixture(ch.random_measure(rng)))
            b = asy.bounds(U, V)
            c = asy.chi(o, U, V)
            assert np.all(c >= b.lower - 1e-12) and np.all(c <= b.upper + 1e-12)
            assert np.all(asy.xi(o, U, V) <= b.radial_upper + 1e-12)

    def test_varrho_folded_sandwich(self, rng):
        for _ in range(20):
            o = cop(dg.Mixture(ch.random_measure(rng)))
            b = asy.folded_bounds(U, V)
            r = asy.varrho(o, U, V)
            assert np.all(r >= b.lower - 1e-12) and np.all(r <= b.upper + 1e-12)

    def test_varrho_exceeds_unfolded_upper(self):
        # the unfolded bound does not hold for varrho off the lower-left quarter
        o = cop(dg.FamilyM(0.2))
        assert asy.varrho(o, 0.3, 0.8) > asy.bounds(0.3, 0.8).upper

    def test_pi_not_maximal(self):
        assert asy.chi(PI, 0.3, 0.2) < asy.chi(cop(dg.FamilyP(0.8)), 0.3, 0.2)


class TestGrids:
    def test_xi_map_of_product(self):
        g = asy.map_grid(PI, "xi", 50)
        assert np.all(np.abs(g.values) <= 1e-15)

    def test_with_bounds_csv(self):
        g = asy.map_grid(M, "chi", 4, with_bounds=True)
        lines = g.to_csv("x").splitlines()
        assert lines[1] == "u,v,value,lower,upper,radial_upper"

    def test_bounds_grid(self):
        g = asy.bounds_grid(10)
        assert g.values.shape == (11, 11)

    def test_bad_functional(self):
        with pytest.raises(ValueError):
            asy.map_grid(PI, "tau", 10)


class TestAttainment:
    def test_example(self):
        a = asy.attain_bounds(0.3, 0.2)
        assert a["sup_chi"].value == pytest.approx(0.625, abs=1e-9)
        assert a["sup_chi"].family == "p" and a["sup_chi"].param == pytest.approx(0.8, abs=1e-6)
        assert a["inf_chi"].value == pytest.approx(0.4, abs=1e-9)
        assert a["inf_chi"].family == "m" and a["inf_chi"].param == pytest.approx(0.8, abs=1e-6)
        assert a["sup_xi"].value == pytest.approx(0.125, abs=1e-9)

    def test_interior_only(self):
        with pytest.raises(ValueError):
            asy.attain_bounds(0.0, 0.5)
