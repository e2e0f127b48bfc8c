import math
from fractions import Fraction

import pytest

from plancherel_gff.errors import ResourceLimitError
from plancherel_gff.gt import partitions_of, sym_dim, weyl_dim
from plancherel_gff.measure import (
    MeasureTable,
    PlancherelParams,
    branching_probabilities,
    coherency_check,
    enumerate_support,
    exact_moment,
    nested_joint_moment,
    poisson_factor,
    poisson_tail_bound,
    rational_part,
    shifted_power_sum,
    weight,
)


def boxes(sig):
    return Fraction(sum(sig))


class TestWeight:
    def test_empty_partition(self):
        params = PlancherelParams(t=Fraction(1, 3), N=4)
        pf, rat = weight((), params)
        assert rat == 1
        assert pf == pytest.approx(math.exp(-4 / 3), rel=1e-15)

    def test_one_box_two_rows(self):
        t = Fraction(2, 5)
        params = PlancherelParams(t=t, N=2)
        pf, rat = weight((1,), params)
        # sym_dim=1, weyl_dim=2, N^1=2
        assert rat == 1
        assert pf * float(rat) == pytest.approx(
            2 * float(t) * math.exp(-2 * float(t)), rel=1e-14
        )

    def test_column_of_two(self):
        t = Fraction(3, 7)
        params = PlancherelParams(t=t, N=2)
        pf, rat = weight((1, 1), params)
        assert rat == Fraction(1, 4)  # dim=1, Dim=1, N^2=4
        assert pf * float(rat) == pytest.approx(
            math.exp(-2 * float(t)) * float(t) ** 2 / 2, rel=1e-14
        )

    def test_negative_part_gets_zero(self):
        params = PlancherelParams(t=Fraction(1, 2), N=2)
        _, rat = weight((0, -1), params)
        assert rat == 0

    def test_too_long_rejected(self):
        params = PlancherelParams(t=Fraction(1, 2), N=2)
        with pytest.raises(ValueError):
            weight((1, 1, 1), params)


class TestEnumerateSupport:
    def test_single_row_is_poisson(self):
        params = PlancherelParams(t=Fraction(1, 10), N=1, tail_epsilon=1e-12)
        table = enumerate_support(params)
        for sig, pf, rat in table.entries:
            n = sum(sig)
            assert rat == 1
            assert pf == pytest.approx(
                math.exp(-0.1) * 0.1**n / math.factorial(n), rel=1e-13
            )

    @pytest.mark.parametrize("n_rows", [1, 2, 3])
    def test_rational_mass_is_one_per_box_count(self, n_rows):
        # sum of sym_dim * weyl_dim over partitions of n with <= N rows is N^n
        for n in range(0, 9):
            total = sum(
                sym_dim(lam) * weyl_dim(lam + (0,) * (n_rows - len(lam)))
                for lam in partitions_of(n, max_parts=n_rows)
            )
            assert total == n_rows**n

    def test_table_rational_mass(self):
        params = PlancherelParams(t=Fraction(1, 2), N=3, tail_epsilon=1e-10)
        table = enumerate_support(params)
        for n, mass in table.rational_mass_by_boxes().items():
            assert mass == 1, n

    def test_covered_mass_approaches_one(self):
        params = PlancherelParams(t=Fraction(1, 4), N=2, tail_epsilon=1e-13)
        table = enumerate_support(params)
        assert table.covered_mass >= 1 - 1e-13
        assert table.covered_mass <= 1 + 1e-12

    def test_normalization_within_tail(self):
        params = PlancherelParams(t=Fraction(1, 2), N=3, tail_epsilon=1e-12)
        table = enumerate_support(params)
        total = sum(pf * float(rat) for _, pf, rat in table.entries)
        assert abs(total - 1) < params.tail_epsilon + 1e-12

    def test_infeasible_raises(self):
        params = PlancherelParams(t=Fraction(30), N=3, tail_epsilon=1e-10)
        with pytest.raises(ResourceLimitError):
            enumerate_support(params)

    def test_json_roundtrip(self):
        params = PlancherelParams(t=Fraction(1, 4), N=2, tail_epsilon=1e-8)
        table = enumerate_support(params)
        restored = MeasureTable.from_json(table.to_json())
        assert restored.params == table.params
        assert restored.entries == table.entries
        assert restored.covered_mass == table.covered_mass


class TestTailBound:
    def test_bound_dominates_true_tail(self):
        mean = Fraction(3, 2)
        for m in range(3, 12):
            true_tail = 1.0 - sum(
                math.exp(-float(mean)) * float(mean**n / math.factorial(n))
                for n in range(m + 1)
            )
            assert poisson_tail_bound(mean, m) >= true_tail - 1e-15

    def test_bound_decreasing(self):
        vals = [poisson_tail_bound(Fraction(2), m) for m in range(4, 15)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestCoherency:
    def test_level_one_total_mass(self):
        # the root has mass 1: the level-1 masses must sum back to it
        params = PlancherelParams(t=Fraction(1, 4), N=1, tail_epsilon=1e-13)
        table = enumerate_support(params)
        total = sum(pf * float(rat) for _, pf, rat in table.entries)
        assert abs(total - 1.0) < 2 * table.tail_bound() + 1e-12

    @pytest.mark.parametrize(
        "n_rows,lam",
        [(1, (1,)), (1, (3,)), (2, (1, 0)), (2, (2, 1))],
    )
    def test_branching_consistency(self, n_rows, lam):
        params = PlancherelParams(t=Fraction(1, 4), N=n_rows, tail_epsilon=1e-13)
        res = coherency_check(params, lam)
        assert abs(res.lhs - res.rhs) < 1e-10
        assert abs(res.lhs - res.rhs) <= 2 * res.certified_error + 1e-12

    def test_all_entries_at_level_two(self):
        params = PlancherelParams(t=Fraction(1, 4), N=2, tail_epsilon=1e-13)
        table = enumerate_support(params)
        for sig, _, rat in table.entries:
            if rat:
                res = coherency_check(params, sig)
                assert abs(res.lhs - res.rhs) < 1e-10, sig


class TestShiftedPowerSum:
    def test_first_power_counts_boxes(self):
        for lam in [(3, 1), (2, 2, 1), (5,), (0, 0), ()]:
            assert shifted_power_sum(1, lam) == sum(lam)

    def test_second_power_one_box(self):
        assert shifted_power_sum(2, (1,)) == 0

    def test_staircase_values(self):
        assert shifted_power_sum(2, (2, 1)) == 0
        assert shifted_power_sum(3, (2, 1)) == Fraction(27, 4)

    def test_padding_invariance(self):
        for k in (1, 2, 3, 4):
            assert shifted_power_sum(k, (3, 1)) == shifted_power_sum(k, (3, 1, 0, 0))

    def test_bad_k(self):
        with pytest.raises(ValueError):
            shifted_power_sum(0, (1,))


class TestExactMoment:
    @pytest.mark.parametrize("t", [Fraction(1, 4), Fraction(1, 2)])
    @pytest.mark.parametrize("n_rows", [1, 2, 3])
    def test_mean_boxes(self, t, n_rows):
        params = PlancherelParams(t=t, N=n_rows, tail_epsilon=1e-13)
        res = exact_moment(lambda s: boxes(s), params, growth=(1.0, 1))
        assert abs(res.value - float(t * n_rows)) <= res.tail_bound + 1e-12

    def test_second_moment_is_poisson(self):
        params = PlancherelParams(t=Fraction(1, 2), N=2, tail_epsilon=1e-13)
        res = exact_moment(lambda s: boxes(s) ** 2, params, growth=(1.0, 2))
        assert abs(res.value - 2.0) <= res.tail_bound + 1e-12

    @pytest.mark.parametrize("t,n_rows", [(Fraction(1, 4), 1), (Fraction(1, 2), 3)])
    def test_variance_boxes(self, t, n_rows):
        params = PlancherelParams(t=t, N=n_rows, tail_epsilon=1e-13)
        m1 = exact_moment(lambda s: boxes(s), params, growth=(1.0, 1))
        m2 = exact_moment(lambda s: boxes(s) ** 2, params, growth=(1.0, 2))
        var = m2.value - m1.value**2
        assert abs(var - float(t * n_rows)) < m2.tail_bound + 3 * m1.tail_bound + 1e-11

    def test_normalization(self):
        params = PlancherelParams(t=Fraction(1, 3), N=2, tail_epsilon=1e-12)
        res = exact_moment(lambda s: Fraction(1), params, growth=(1.0, 0))
        assert abs(res.value - 1.0) <= res.tail_bound + 1e-12

    def test_growth_bound_required(self):
        params = PlancherelParams(t=Fraction(1, 3), N=2)
        with pytest.raises(ValueError):
            exact_moment(lambda s: Fraction(1), params, growth=None)


class TestNestedJointMoment:
    def test_branching_probabilities_sum_to_one(self):
        params = PlancherelParams(t=Fraction(1, 4), N=3, tail_epsilon=1e-10)
        table = enumerate_support(params)
        for nu, _, rat in table.entries:
            if rat:
                for k in range(0, 3):
                    total = sum(p for _, p in branching_probabilities(nu, k))
                    assert total == 1

    def test_trivial_low_factor(self):
        params = PlancherelParams(t=Fraction(1, 4), N=2, tail_epsilon=1e-13)
        joint = nested_joint_moment(
            1,
            lambda s: Fraction(1),
            lambda s: boxes(s),
            params,
            growth=(1.0, 1),
        )
        direct = exact_moment(lambda s: boxes(s), params, growth=(1.0, 1))
        assert joint == pytest.approx(direct.value, abs=1e-12)

    def test_trivial_high_factor_projects_to_lower_level(self):
        # marginalizing the top level reproduces the level-1 measure
        t = Fraction(1, 4)
        params2 = PlancherelParams(t=t, N=2, tail_epsilon=1e-13)
        params1 = PlancherelParams(t=t, N=1, tail_epsilon=1e-13)
        joint = nested_joint_moment(
            1,
            lambda s: boxes(s),
            lambda s: Fraction(1),
            params2,
            growth=(1.0, 1),
        )
        direct = exact_moment(lambda s: boxes(s), params1, growth=(1.0, 1))
        assert abs(joint - direct.value) < 1e-10

    def test_mean_at_lower_level(self):
        # E of the level-k box count must be t*k
        t = Fraction(1, 4)
        params = PlancherelParams(t=t, N=3, tail_epsilon=1e-13)
        for k in (1, 2):
            joint = nested_joint_moment(
                k,
                lambda s: boxes(s),
                lambda s: Fraction(1),
                params,
                growth=(1.0, 1),
            )
            assert abs(joint - float(t * k)) < 1e-10

    def test_summation_order_irrelevant(self):
        # recompute E[p1_low * p1_high] grouping by the lower signature
        t = Fraction(1, 4)
        params = PlancherelParams(t=t, N=2, tail_epsilon=1e-12)
        via_module = nested_joint_moment(
            1,
            lambda s: shifted_power_sum(1, s),
            lambda s: shifted_power_sum(1, s),
            params,
            growth=(1.0, 2),
        )
        table = enumerate_support(params)
        mean = params.mean_boxes
        by_mu: dict = {}
        for nu, _, rat in table.entries:
            if not rat:
                continue
            w_exact = rat * mean ** sum(nu) / math.factorial(sum(nu))
            for mu, prob in branching_probabilities(nu, 1):
                by_mu.setdefault(mu, Fraction(0))
                by_mu[mu] += w_exact * prob * shifted_power_sum(1, nu)
        swapped = math.exp(-float(mean)) * float(
            sum(shifted_power_sum(1, mu) * v for mu, v in by_mu.items())
        )
        assert via_module == pytest.approx(swapped, abs=1e-14)
