import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from conftest import random_spec
from slcopula import diagonal as dg
from slcopula import semilinear as sl
from slcopula.errors import DomainError, PreconditionError

G = np.linspace(0, 1, 51)
U, V = np.meshgrid(G, G, indexing="ij")


def obj(spec, cls="copula"):
    return sl.SemilinearObject(spec, cls)


M = obj(dg.identity())
PI = obj(dg.product())
HALF = obj(dg.FamilyM(0.5))
BETA = obj(dg.FamilyBeta(0.5), "quasicopula")


class TestEval:
    def test_examples(self):
        assert M(0.3, 0.7) == pytest.approx(0.3, abs=1e-15)
        assert PI(0.3, 0.7) == pytest.approx(0.21, abs=1e-15)
        assert HALF(0.3, 0.6) == pytest.approx(0.18, abs=1e-15)

    def test_origin(self):
        assert sl.evaluate(HALF, 0.0, 0.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            sl.evaluate(HALF, 1.1, 0.5)
        with pytest.raises(DomainError):
            sl.evaluate(HALF, 0.5, float("nan"))

    def test_boundary_conditions(self, rng):
        for _ in range(50):
            o = obj(random_spec(rng), "semicopula")
            assert np.all(o(G, np.zeros_like(G)) == 0)
            assert np.all(o(np.zeros_like(G), G) == 0)
            assert_allclose(o(G, np.ones_like(G)), G, atol=1e-15)
            assert_allclose(o(np.ones_like(G), G), G, atol=1e-15)

    def test_exchangeable(self, rng):
        for _ in range(30):
            o = obj(random_spec(rng), "semicopula")
            assert np.array_equal(o(U, V), o(V, U))

    def test_frechet_and_product_dominance(self, rng):
        n = 0
        for _ in range(120):
            spec = random_spec(rng)
            if not dg.validate(spec).in_copula_class:
                continue
            n += 1
            C = obj(spec)(U, V)
            assert np.all(C <= np.minimum(U, V) + 1e-12)
            assert np.all(C >= np.maximum(0, U + V - 1) - 1e-12)
            assert np.all(C >= U * V - 1e-12)
        assert n > 20

    def test_convex_homomorphism(self, rng):
        for _ in range(30):
            a, b = random_spec(rng), random_spec(rng)
            w = float(rng.random())
            blended = obj(dg.Blend((a, b), (w, 1 - w)), "semicopula")(U, V)
            parts = w * obj(a, "semicopula")(U, V) + (1 - w) * obj(b, "semicopula")(U, V)
            assert_allclose(blended, parts, atol=1e-12)

    def test_mixture_homomorphism(self, half_m_half_pi):
        C = obj(half_m_half_pi)(U, V)
        assert_allclose(C, 0.5 * np.minimum(U, V) + 0.5 * U * V, atol=1e-12)


class TestVolume:
    def test_full_square(self, rng):
        for _ in range(20):
            assert sl.volume(obj(random_spec(rng), "semicopula"), 0, 1, 0, 1) == pytest.approx(1)

    def test_product_rectangle(self):
        assert sl.volume(PI, 0.2, 0.5, 0.3, 0.8) == pytest.approx(0.15, abs=1e-15)

    def test_degenerate(self):
        assert sl.volume(HALF, 0.3, 0.3, 0.1, 0.9) == 0.0

    def test_bad_rectangle(self):
        with pytest.raises(DomainError):
            sl.volume(HALF, 0.5, 0.3, 0.1, 0.9)

    def test_beta_negative_on_diagonal_segment(self):
        a, h = 0.8, 0.01
        assert math.exp(-0.5) < a
        assert sl.volume(BETA, a, a + h, a, a + h) < 0

    def test_beta_positive_below_breakpoint(self):
        a, h = 0.3, 0.01
        assert sl.volume(BETA, a, a + h, a, a + h) >= 0


class TestSurvival:
    def test_examples(self):
        assert sl.survival(PI, 0.3, 0.6) == pytest.approx(0.18, abs=1e-15)
        assert sl.survival(M, 0.3, 0.7) == pytest.approx(0.3, abs=1e-15)
        assert sl.survival(obj(dg.FamilyP(0.8)), 0.3, 0.2) == pytest.approx(0.2, abs=1e-15)

    def test_product_symmetric(self):
        assert_allclose(sl.survival(PI, U, V), U * V, atol=1e-15)


class TestPositivity:
    def test_family_m(self):
        r = sl.positivity_oracle(HALF, 200)
        assert r.min_volume >= -1e-12

    def test_product(self):
        r = sl.positivity_oracle(PI, 100)
        assert r.min_volume == pytest.approx(1e-4, abs=1e-15)
        assert r.negative_mass_total == 0.0

    def test_report_shape(self):
        r = sl.positivity_oracle(BETA, 50)
        assert r.volumes.values.shape == (50, 50)
        assert r.volumes.values.sum() == pytest.approx(1.0)
        i, j = r.argmin_cell
        assert r.volumes.values[i, j] == r.min_volume < 0
        js = r.to_json()
        assert js["argmin_cell"]["u"] == [i / 50, (i + 1) / 50]

    @pytest.mark.parametrize("beta", [0.2, 0.5, 0.8])
    def test_beta_negative_mass(self, beta):
        """Grid negative mass converges to (2 - beta) e^(beta - 1) - 1.

        On the segment (e^(beta-1), 1) the diagonal carries density
        delta'(t) - 2 t phi'(t) = ln t, negative throughout.
        """
        o = obj(dg.FamilyBeta(beta), "quasicopula")
        exact = (2 - beta) * math.exp(beta - 1) - 1
        got = sl.positivity_oracle(o, 400).negative_mass_total
        assert got == pytest.approx(exact, abs=5e-3)

    def test_beta_negative_mass_by_quadrature(self):
        from scipy.integrate import quad
        beta = 0.5
        a = math.exp(beta - 1)
        spec = dg.FamilyBeta(beta)
        density = lambda t: float(spec._slope(t)) - 2 * t * (1 / t)
        mass, _ = quad(density, a, 1)
        assert density(0.9) == pytest.approx(math.log(0.9))
        assert mass == pytest.approx((2 - beta) * a - 1, abs=1e-12)
        # the density starts at ln a = beta - 1
        assert density(a) == pytest.approx(beta - 1)

    def test_n_too_small(self):
        with pytest.raises(ValueError):
            sl.positivity_oracle(HALF, 1)


class TestFromSpec:
    def test_declares_strongest_class(self):
        assert sl.from_spec(dg.FamilyM(0.5)).declared_class == "copula"
        assert sl.from_spec(dg.FamilyBeta(0.5)).declared_class == "quasicopula"
        assert sl.from_spec(dg.StepRight(0.4)).declared_class == "semicopula"

    def test_no_class(self):
        with pytest.raises(PreconditionError):
            sl.from_spec(dg.Tabulated(((0, 0), (1, 0.5))))

    def test_bad_tag(self):
        with pytest.raises(ValueError):
            sl.SemilinearObject(dg.identity(), "bicopula")


def test_surface_grid_csv():
    g = sl.surface_grid(HALF, 4)
    text = g.to_csv("# note")
    lines = text.splitlines()
    assert lines[1] == "u,v,value"
    assert len(lines) == 2 + 25


class TestSample:
    def test_comonotone(self):
        s = sl.sample(M, 1000, seed=3)
        assert np.array_equal(s[:, 0], s[:, 1])

    def test_independence(self):
        s = sl.sample(PI, 100_000, seed=1)
        assert abs(np.corrcoef(s.T)[0, 1]) < 0.01

    def test_deterministic(self):
        a = sl.sample(HALF, 500, seed=7)
        b = sl.sample(HALF, 500, seed=7)
        c = sl.sample(HALF, 500, seed=8)
        assert np.array_equal(a, b) and not np.array_equal(a, c)

    def test_shape_and_empty(self):
        assert sl.sample(HALF, 0).shape == (0, 2)

    def test_requires_copula(self):
        with pytest.raises(PreconditionError):
            sl.sample(BETA, 10)

    @pytest.mark.parametrize("spec", [dg.FamilyM(0.5), dg.FamilyP(0.3),
                                      dg.Tabulated(((0, 0), (0.5, 0.4), (1, 1)))])
    def test_uniform_margins(self, spec):
        s = sl.sample(sl.from_spec(spec), 100_000, seed=0)
        for col in s.T:
            assert stats.kstest(col, "uniform").pvalue > 1e-3

    def test_matches_copula_on_rectangles(self, half_m_half_pi):
        o = obj(half_m_half_pi)
        s = sl.sample(o, 200_000, seed=2)
        for u, v in [(0.3, 0.6), (0.5, 0.5), (0.8, 0.2)]:
            emp = np.mean((s[:, 0] <= u) & (s[:, 1] <= v))
            assert emp == pytest.approx(o(u, v), abs=4e-3)

    def test_spearman_family_m(self):
        s = sl.sample(HALF, 20_000, seed=5)
        rho = stats.spearmanr(s[:, 0], s[:, 1]).statistic
        assert rho == pytest.approx(0.0625, abs=0.03)
