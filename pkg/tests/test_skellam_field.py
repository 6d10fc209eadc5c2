import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skellam_fields import (
    BoxRegion,
    GsrfParams,
    LatticeSpec,
    LatticeSpecError,
    PmfTable,
    RngStream,
    SingularPgfError,
    SkellamParams,
    ValidationError,
    WindowMismatchError,
    gsrf_compound_sample,
    gsrf_count,
    gsrf_moments,
    gsrf_superpose,
    lattice_sample,
    sample_gsrf_field,
    srf_infinitesimal_check,
    srf_pde_residual,
    srf_pgf,
    srf_pmf,
    srf_pmf_table,
    empirical_pmf,
    tv_distance,
)

UNIT = BoxRegion((0.0, 0.0), (1.0, 1.0))
PARAMS = SkellamParams(2.0, 1.0)


def poisson_convolution_oracle(l1, l2, st_, n, terms=80):
    """Brute-force convolution of the two Poisson component pmfs."""
    mu1, mu2 = l1 * st_, l2 * st_
    total = 0.0
    for k in range(max(0, -n), terms):
        total += math.exp((n + k) * math.log(mu1) - math.lgamma(n + k + 1)
                          + k * math.log(mu2) - math.lgamma(k + 1))
    return math.exp(-(mu1 + mu2)) * total


class TestSrfPmf:
    def test_against_convolution_oracle(self):
        for n in range(-20, 21):
            assert srf_pmf(PARAMS, 1.0, 1.0, n) == pytest.approx(
                poisson_convolution_oracle(2.0, 1.0, 1.0, n), abs=1e-12)

    def test_empty_rectangle(self):
        assert srf_pmf(PARAMS, 0.0, 1.0, 0) == 1.0
        assert srf_pmf(PARAMS, 0.0, 1.0, 2) == 0.0

    def test_symmetry_for_equal_rates(self):
        p = SkellamParams(1.3, 1.3)
        for n in range(1, 8):
            assert srf_pmf(p, 1.0, 0.7, n) == srf_pmf(p, 1.0, 0.7, -n)

    @given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.integers(-10, 10))
    @settings(max_examples=40, deadline=None)
    def test_rate_swap_identity(self, l1, l2, n):
        a = srf_pmf(SkellamParams(l1, l2), 1.0, 1.0, n)
        b = srf_pmf(SkellamParams(l2, l1), 1.0, 1.0, -n)
        assert a == pytest.approx(b, rel=1e-14, abs=1e-300)

    def test_mode_shifts_sign_under_swap(self):
        t1 = srf_pmf_table(SkellamParams(2.0, 1.0), 1.0, 1.0, -20, 20)
        t2 = srf_pmf_table(SkellamParams(1.0, 2.0), 1.0, 1.0, -20, 20)
        assert t1.support[np.argmax(t1.probs)] > 0
        assert t2.support[np.argmax(t2.probs)] < 0

    def test_normalization(self):
        for l1, l2, s, t in [(1.0, 1.0, 1.0, 1.0), (3.0, 0.5, 1.0, 2.0), (2.0, 1.0, 1.5, 1.0)]:
            table = srf_pmf_table(SkellamParams(l1, l2), s, t, -30, 30)
            assert table.tail_mass < 1e-10


class TestSrfPmfTable:
    def test_point_mass_at_zero_area(self):
        table = srf_pmf_table(PARAMS, 0.0, 1.0, -5, 5)
        assert table.prob(0) == 1.0
        assert table.tail_mass == 0.0

    def test_entries_nonnegative(self):
        table = srf_pmf_table(PARAMS, 1.0, 1.0, -15, 15)
        assert np.all(table.probs >= 0.0)

    def test_csv_round_trip(self):
        table = srf_pmf_table(PARAMS, 1.0, 1.0, -10, 10)
        back = PmfTable.from_csv(table.to_csv())
        assert np.array_equal(back.probs, table.probs)
        assert back.tail_mass == table.tail_mass

    def test_json_round_trip(self):
        table = srf_pmf_table(PARAMS, 1.0, 1.0, -10, 10)
        back = PmfTable.from_json(table.to_json())
        assert np.array_equal(back.probs, table.probs)
        assert back.tail_mass == table.tail_mass

    def test_invariant_validation(self):
        with pytest.raises(ValidationError):
            PmfTable(0, 1, np.array([0.5, 0.2]), 0.0)  # mass 0.7 != 1
        with pytest.raises(ValidationError):
            PmfTable.from_probs(0, [0.9, 0.2])  # exceeds 1 beyond the clamp
        # a tiny negative tail is clamped to zero
        probs = [0.5, 0.5 + 5e-13]
        assert PmfTable.from_probs(0, probs).tail_mass == 0.0


class TestGsrfCount:
    def test_zero_measure(self):
        region = BoxRegion((0.0, 0.0), (0.0, 1.0))
        draws = gsrf_count(PARAMS.to_gsrf(), region, RngStream(1), size=100)
        assert np.all(draws == 0.0)

    def test_mean_and_variance(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        draws = gsrf_count(params, UNIT, RngStream(2), size=100_000)
        assert abs(draws.mean() - 1.0) / math.sqrt(3.0 / draws.size) < 4.0
        params2 = GsrfParams(((2.0, 1.0),))
        draws2 = gsrf_count(params2, UNIT, RngStream(3), size=100_000)
        centered = draws2 - draws2.mean()
        se = math.sqrt(((centered ** 4).mean() - draws2.var() ** 2) / draws2.size)
        assert abs(draws2.var(ddof=1) - 4.0) / se < 4.0

    def test_params_validation(self):
        with pytest.raises(ValidationError):
            GsrfParams(())
        with pytest.raises(ValidationError):
            GsrfParams(((0.0, 1.0),))
        with pytest.raises(ValidationError):
            GsrfParams(((1.0, 1.0), (1.0, 2.0)))
        with pytest.raises(ValidationError):
            GsrfParams(((1.0, 0.0),))


class TestGsrfMoments:
    def test_disjoint_regions_uncorrelated(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        b2 = BoxRegion((2.0, 2.0), (3.0, 3.0))
        _, _, cov = gsrf_moments(params, UNIT, b2)
        assert cov == 0.0

    def test_identical_regions(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        mean, var, cov = gsrf_moments(params, UNIT, UNIT)
        assert cov == var == 3.0
        assert mean == 1.0

    def test_half_overlap(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        b2 = BoxRegion((0.5, 0.0), (1.5, 1.0))
        _, _, cov = gsrf_moments(params, UNIT, b2)
        assert cov == pytest.approx(3.0 * 0.5)


class TestSuperpose:
    def test_rates_add_on_common_jumps(self):
        p = GsrfParams(((1.0, 1.0),))
        merged = gsrf_superpose(p, p)
        assert merged.jumps == ((1.0, 2.0),)

    def test_disjoint_jump_sets_concatenate(self):
        a = GsrfParams(((1.0, 1.0),))
        b = GsrfParams(((2.0, 0.5),))
        merged = gsrf_superpose(a, b)
        assert dict(merged.jumps) == {1.0: 1.0, 2.0: 0.5}

    def test_moment_identity(self):
        a = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        b = GsrfParams(((1.0, 0.5), (2.0, 0.3)))
        merged = gsrf_superpose(a, b)
        ma, va, _ = gsrf_moments(a, UNIT, UNIT)
        mb, vb, _ = gsrf_moments(b, UNIT, UNIT)
        mm, vm, _ = gsrf_moments(merged, UNIT, UNIT)
        assert mm == pytest.approx(ma + mb)
        assert vm == pytest.approx(va + vb)
        # MC cross-check of the superposition law
        rng = RngStream(4)
        direct = gsrf_count(merged, UNIT, rng, size=50_000)
        split = gsrf_count(a, UNIT, rng, size=50_000) + gsrf_count(b, UNIT, rng, size=50_000)
        se = math.sqrt(2.0 * vm / direct.size)
        assert abs(direct.mean() - split.mean()) / se < 4.0


class TestCompoundRepresentation:
    def test_zero_measure(self):
        region = BoxRegion((0.0, 0.0), (1.0, 0.0))
        draws = gsrf_compound_sample(PARAMS.to_gsrf(), region, RngStream(5), size=50)
        assert np.all(draws == 0.0)

    def test_matches_direct_sampler_in_tv(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        direct = gsrf_count(params, UNIT, RngStream(6), size=100_000)
        comp = gsrf_compound_sample(params, UNIT, RngStream(7), size=100_000)
        tv = tv_distance(empirical_pmf(direct, -15, 15), empirical_pmf(comp, -15, 15))
        assert tv < 0.01

    def test_mgf_identity(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        u = 0.3
        draws = gsrf_compound_sample(params, UNIT, RngStream(8), size=100_000)
        vals = np.exp(u * draws)
        analytic = math.exp(sum(lam * (math.exp(u * j) - 1.0) for j, lam in params.jumps))
        z = abs(vals.mean() - analytic) / (vals.std(ddof=1) / math.sqrt(vals.size))
        assert z < 4.0


class TestPgfAndGoverningEquations:
    def test_normalization_points(self):
        assert srf_pgf(PARAMS, 1.0, 1.0, 1.0) == 1.0
        assert srf_pgf(PARAMS, 0.4, 0.0, 1.0) == 1.0

    def test_direct_value(self):
        # l1=2, l2=1, st=1, u=0.5: exponent 2(-0.5) + 1(1) = 0
        assert srf_pgf(PARAMS, 0.5, 1.0, 1.0) == 1.0

    def test_domain_error(self):
        with pytest.raises(ValidationError):
            srf_pgf(PARAMS, 0.0, 1.0, 1.0)
        with pytest.raises(ValidationError):
            srf_pgf(PARAMS, -0.3, 1.0, 1.0)

    def test_pgf_matches_pmf_sum(self):
        u = 0.8
        table = srf_pmf_table(PARAMS, 1.0, 1.0, -30, 30)
        series = sum(p * u ** n for n, p in zip(table.support, table.probs))
        assert series == pytest.approx(srf_pgf(PARAMS, u, 1.0, 1.0), abs=1e-10)

    def test_residual_magnitude(self):
        res_pgf, _ = srf_pde_residual(PARAMS, 0.5, 1.0, 1.0, 1e-3)
        assert abs(res_pgf) < 1e-5
        _, res_pmf = srf_pde_residual(SkellamParams(1.0, 1.0), 0.5, 1.0, 1.0, 1e-4, n=0)
        assert abs(res_pmf) < 1e-6

    def test_richardson_second_order(self):
        r1 = srf_pde_residual(PARAMS, 0.4, 1.0, 1.0, 1e-3, n=1)
        r2 = srf_pde_residual(PARAMS, 0.4, 1.0, 1.0, 5e-4, n=1)
        assert r1[0] / r2[0] == pytest.approx(4.0, abs=0.5)
        assert r1[1] / r2[1] == pytest.approx(4.0, abs=0.5)

    def test_singular_guard(self):
        u_star = math.sqrt(1.0 / 2.0)
        with pytest.raises(SingularPgfError):
            srf_pde_residual(PARAMS, u_star + 5e-4, 1.0, 1.0, 1e-3)


class TestLattice:
    def test_empty_sum(self):
        spec = LatticeSpec(4)
        draws = lattice_sample(spec, PARAMS.to_gsrf(), 0.1, 1.0, RngStream(9), size=20)
        assert np.all(draws == 0.0)

    def test_mean(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        k = 64
        draws = lattice_sample(LatticeSpec(k), params, 1.0, 1.0, RngStream(10), size=100_000)
        cells = (k * k)
        mean = cells * (2.0 - 1.0) / k ** 2
        var = cells * (2.0 + 1.0) / k ** 2  # Bernoulli-sum variance is close to Poisson
        z = abs(draws.mean() - mean) / math.sqrt(var / draws.size)
        assert z < 4.0

    def test_invalid_when_k_too_small(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        with pytest.raises(LatticeSpecError):
            lattice_sample(LatticeSpec(1), params, 1.0, 1.0, RngStream(11))

    def test_heterogeneous_rule(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        spec = LatticeSpec(8, cell_probs=lambda l, lp: (2.0 / 64.0, 1.0 / 64.0))
        draws = lattice_sample(spec, params, 1.0, 1.0, RngStream(12), size=20_000)
        z = abs(draws.mean() - 1.0) / math.sqrt(3.0 / draws.size)
        assert z < 4.0

    def test_tv_to_exact_law_shrinks_with_k(self):
        params = GsrfParams(((1.0, 2.0), (-1.0, 1.0)))
        table = srf_pmf_table(PARAMS, 1.0, 1.0, -30, 30)
        tvs = []
        for i, k in enumerate((4, 64)):
            draws = lattice_sample(LatticeSpec(k), params, 1.0, 1.0,
                                   RngStream(13, i), size=50_000)
            tvs.append(tv_distance(empirical_pmf(draws, -30, 30), table))
        assert tvs[1] < tvs[0]


class TestInfinitesimalExpansion:
    def test_normalized_deviations_small(self):
        report = srf_infinitesimal_check(PARAMS, 1e-4)
        assert report.dev_plus < 1e-3
        assert report.dev_minus < 1e-3
        assert report.dev_zero < 1e-3
        assert report.multi_jump_ratio < 1e-3

    def test_first_order_remainder_scaling(self):
        big = srf_infinitesimal_check(PARAMS, 1e-3)
        small = srf_infinitesimal_check(PARAMS, 1e-4)
        for attr in ("dev_plus", "dev_minus", "dev_zero"):
            assert getattr(small, attr) < 0.2 * getattr(big, attr)


class TestPlanarFieldSample:
    def test_increment_consistency(self):
        field = sample_gsrf_field(PARAMS.to_gsrf(), 2.0, 2.0, RngStream(14))
        total = field.value_at(2.0, 2.0)
        quads = (field.increment(0.0, 0.0, 1.0, 1.0) + field.increment(1.0, 0.0, 2.0, 1.0)
                 + field.increment(0.0, 1.0, 1.0, 2.0) + field.increment(1.0, 1.0, 2.0, 2.0))
        assert quads == total

    def test_disjoint_increments_uncorrelated(self):
        params = PARAMS.to_gsrf()
        n = 20_000
        rng = RngStream(15)
        a = np.empty(n)
        b = np.empty(n)
        for i in range(n):
            field = sample_gsrf_field(params, 2.0, 1.0, rng)
            a[i] = field.increment(0.0, 0.0, 1.0, 1.0)
            b[i] = field.increment(1.0, 0.0, 2.0, 1.0)
        var = 3.0  # per unit square
        z = abs(np.cov(a, b)[0, 1]) / math.sqrt(var * var / n)
        assert z < 4.0


class TestTvWindows:
    def test_window_mismatch(self):
        t1 = srf_pmf_table(PARAMS, 1.0, 1.0, -5, 5)
        t2 = srf_pmf_table(PARAMS, 1.0, 1.0, -6, 6)
        with pytest.raises(WindowMismatchError):
            tv_distance(t1, t2)
