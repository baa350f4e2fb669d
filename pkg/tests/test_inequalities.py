"""Inequality reports: torus, coefficient, hypercube, probe functionals."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xplab.inequalities import (
    BMW,
    Enflo,
    Pisier,
    convolution_probe,
    convolution_search,
    cotype_report,
    displacement_report,
    linear_xp_report,
    metric_xp_report,
    reverse_linear_xp_report,
    reverse_metric_xp_report,
    scaling_witness_report,
    smoothness_report,
)
from xplab.lattice import GridFunction, make_sample_plan, random_grid_function
from xplab.operators import HypercubeFunction


def indicator(modulus: int, n: int, p: float) -> GridFunction:
    vals = np.zeros((modulus,) * n + (1,))
    vals[(0,) * n + (0,)] = 1.0
    return GridFunction(modulus, n, 1, p, vals)


def plan_for(modulus: int, n: int, k: int = 1):
    return make_sample_plan(modulus, n, k, budget=10**7, seed=0)


class TestLinearXp:
    def test_unit_pair_oracle(self):
        # [DERIVED] n=2, k=1, p=4, a=(1,1)
        rep = linear_xp_report([1.0, 1.0], 1, 4.0, plan_for(1, 2))
        assert rep.lhs == pytest.approx(1.0)
        assert rep.rhs_terms["ell_p"] == pytest.approx(1.0)
        assert rep.rhs_terms["rademacher"] == pytest.approx(2.0)

    def test_square_function_mode_scalar(self):
        rep = linear_xp_report(
            [1.0, 1.0], 1, 4.0, plan_for(1, 2), square_function=True
        )
        assert rep.rhs_terms["square_function"] == pytest.approx(1.0)

    def test_square_function_rejects_vectors(self):
        with pytest.raises(ValueError):
            linear_xp_report(
                [[1.0, 0.0], [0.0, 1.0]], 1, 4.0, plan_for(1, 2),
                square_function=True,
            )

    @settings(max_examples=20, deadline=None)
    @given(
        a=st.lists(
            st.floats(-3, 3, allow_nan=False).filter(lambda v: abs(v) > 1e-3),
            min_size=2, max_size=4,
        )
    )
    def test_square_below_rademacher(self, a):
        n = len(a)
        plan = plan_for(1, n)
        sq = linear_xp_report(a, n, 4.0, plan, square_function=True)
        rad = linear_xp_report(a, n, 4.0, plan)
        assert (
            sq.rhs_terms["square_function"]
            <= rad.rhs_terms["rademacher"] * (1 + 1e-12)
        )

    def test_degenerate_flags_zero_input(self):
        rep = linear_xp_report([0.0, 0.0], 1, 4.0, plan_for(1, 2))
        assert rep.degenerate
        assert rep.implied_constant is None


class TestReverseLinearXp:
    def test_single_coefficient(self):
        # [TRIVIAL] n = k = 1: lhs = |a|^p + |a|^p, rhs = |a|^p
        rep = reverse_linear_xp_report([1.0], 1, 4.0, plan_for(1, 1))
        assert rep.lhs == pytest.approx(2.0)
        assert rep.rhs_terms["subset"] == pytest.approx(1.0)
        assert rep.lhs_terms == {"ell_p": 1.0, "rademacher": 1.0}


class TestMetricXp:
    def test_indicator_oracle(self):
        # [DERIVED] Z_4^1, m=1, k=n=1, p=4: every term is 0.5
        rep = metric_xp_report(indicator(4, 1, 4.0), 1, plan_for(4, 1))
        assert rep.lhs == pytest.approx(0.5)
        assert rep.rhs_terms["edge"] == pytest.approx(0.5)
        assert rep.rhs_terms["diag"] == pytest.approx(0.5)
        assert rep.implied_constant == pytest.approx(0.5)
        assert rep.warnings  # m = 1 is far below both hypothesis thresholds

    def test_requires_modulus_multiple_of_four(self):
        with pytest.raises(ValueError):
            metric_xp_report(indicator(6, 1, 4.0), 1, plan_for(6, 1))


class TestReverseMetricXp:
    def test_indicator_oracle(self):
        # [DERIVED] Z_8^1, m=1, k=n=1, p=4
        rep = reverse_metric_xp_report(indicator(8, 1, 4.0), 1, plan_for(8, 1))
        assert rep.lhs_terms["cotype"] == pytest.approx(0.25)
        assert rep.lhs_terms["type"] == pytest.approx(0.25)
        assert rep.lhs == pytest.approx(0.5)
        # shifted-set moment 0.25 scaled by p^{p/2} = 16
        assert rep.rhs_terms["subset"] == pytest.approx(0.25 * 4.0**2)
        assert "goal1" in rep.extra and "goal2" in rep.extra


class TestSmoothness:
    def make_linear(self, n: int) -> HypercubeFunction:
        vals = np.empty((2,) * n + (1,))
        for eps in itertools.product((-1, 1), repeat=n):
            idx = tuple((e + 1) // 2 for e in eps)
            vals[idx] = float(eps[0])
        return HypercubeFunction(n, 1, vals)

    def test_enflo_first_coordinate_oracle(self):
        # [DERIVED] h = eps_1 on the square: antipode gap 2, one flip gap 2
        rep = smoothness_report(self.make_linear(2), Enflo(2.0))
        assert rep.lhs == pytest.approx(4.0)
        assert sum(rep.rhs_terms.values()) == pytest.approx(4.0)
        assert rep.implied_constant == pytest.approx(1.0)

    def test_bmw_scaling_of_enflo(self):
        h = self.make_linear(2)
        enflo = smoothness_report(h, Enflo(4.0))
        bmw = smoothness_report(h, BMW(2.0, 4.0))
        n, q, p = 2, 2.0, 4.0
        assert sum(bmw.rhs_terms.values()) == pytest.approx(
            n ** (p / q - 1) * sum(enflo.rhs_terms.values())
        )

    def test_pisier_positive(self):
        gen = np.random.default_rng(3)
        h = HypercubeFunction(3, 2, gen.standard_normal((2, 2, 2, 2)))
        rep = smoothness_report(h, Pisier(3.0))
        assert rep.lhs > 0 and sum(rep.rhs_terms.values()) > 0

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10**6), n=st.integers(1, 4))
    def test_scalar_enflo_two_constant_at_most_one(self, seed, n):
        gen = np.random.default_rng(seed)
        h = HypercubeFunction(n, 1, gen.standard_normal((2,) * n + (1,)))
        rep = smoothness_report(h, Enflo(2.0))
        if not rep.degenerate:
            assert rep.implied_constant <= 1 + 1e-12


class TestCotype:
    def test_three_letter_brute_force(self):
        f = random_grid_function(4, 2, 1, 2.0, seed=21)
        rep = cotype_report(f, 2.0, "three-letter", plan_for(4, 2))
        m, M, n = 2, 4, 2
        lhs = 0.0
        for j in range(n):
            tot = 0.0
            for x in itertools.product(range(M), repeat=n):
                y = tuple((c + (m if a == j else 0)) % M for a, c in enumerate(x))
                tot += float((f(y) - f(x))[0] ** 2)
            lhs += tot / M**n
        lhs /= m**2
        rhs = 0.0
        for eps in itertools.product((-1, 0, 1), repeat=n):
            for x in itertools.product(range(M), repeat=n):
                y = tuple((c + e) % M for c, e in zip(x, eps))
                rhs += float((f(y) - f(x))[0] ** 2)
        rhs /= 3**n * M**n
        assert rep.lhs == pytest.approx(lhs)
        assert rep.rhs_terms["diag"] == pytest.approx(rhs)

    def test_rademacher_variant_modulus_check(self):
        with pytest.raises(ValueError):
            cotype_report(
                random_grid_function(4, 1, 1, 2.0, seed=0),
                2.0, "rademacher", plan_for(4, 1),
            )


class TestConvolutionProbe:
    def test_brute_force_agreement(self):
        # modulus 8: on Z_4 the smoothed diagonal is identically zero
        f = random_grid_function(8, 2, 1, 4.0, seed=31)
        rep = convolution_probe(f, 4.0)
        M, n, p = 8, 2, 4.0
        # independent edge term: plain sum over x and coordinates
        edge = 0.0
        for j in range(n):
            for x in itertools.product(range(M), repeat=n):
                y = tuple((c + (1 if a == j else 0)) % M for a, c in enumerate(x))
                edge += abs(float((f(y) - f(x))[0])) ** p
        assert rep.rhs_terms["edge"] == pytest.approx(edge)
        assert rep.lhs >= 0
        assert rep.extra["beta_lower_bound"] == pytest.approx(
            (rep.rhs_terms["rad"] + rep.rhs_terms["edge"]) / rep.lhs
        )

    def test_search_is_deterministic(self):
        a = convolution_search(8, 2, 4.0, trials=5, seed=9)
        b = convolution_search(8, 2, 4.0, trials=5, seed=9)
        assert a == b
        assert 0 <= a["argmin_trial"] < 5

    def test_scalar_only(self):
        with pytest.raises(ValueError):
            convolution_probe(random_grid_function(4, 1, 2, 4.0, seed=0), 4.0)


class TestScalingWitness:
    @pytest.mark.parametrize("m,n,k,p", [(2, 2, 1, 4.0), (3, 3, 2, 4.0), (2, 4, 3, 6.0)])
    def test_closed_forms(self, m, n, k, p):
        rep = scaling_witness_report(m, n, k, p)
        step = abs(np.exp(1j * math.pi / m) - 1.0)
        assert rep.extra["shifted_closed_form"] == pytest.approx((2 * math.sqrt(k)) ** p)
        assert rep.extra["edge_closed_form_per_coordinate"] == pytest.approx(step**p)
        assert rep.extra["diag_closed_form"] == pytest.approx(n ** (p / 2) * step**p)
        assert rep.lhs == pytest.approx((2 * math.sqrt(k)) ** p / m**p)

    def test_implied_constant_stabilizes_in_m(self):
        # the edge step approaches pi/m, so the ratio has an m-free limit
        a = scaling_witness_report(20, 2, 1, 4.0)
        b = scaling_witness_report(40, 2, 1, 4.0)
        assert a.implied_constant == pytest.approx(b.implied_constant, rel=1e-2)


class TestDisplacement:
    def test_brute_force_lhs(self):
        from xplab.operators import DS, box_average

        f = random_grid_function(8, 2, 1, 4.0, seed=41)
        rep = displacement_report(f, (1,), 3, 4.0)
        df = box_average(f, DS((1,), 3))
        lhs = float(np.sum(np.abs(f.values - df.values) ** 4))
        assert rep.lhs == pytest.approx(lhs)
        assert set(rep.rhs_terms) == {"diag", "set"}
