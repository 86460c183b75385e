import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repsel.metrics import (
    CostModelInput,
    compression_summary,
    gram_ops_cascade,
    gram_ops_independent,
    scaling_table,
    selection_flops,
)


class TestGramOps:
    @pytest.mark.parametrize(
        "L,T,expected",
        [(12, 512, 3_145_728), (28, 512, 7_340_032), (32, 512, 8_388_608), (1, 1, 1)],
    )
    def test_independent_counts(self, L, T, expected):
        got = gram_ops_independent(L, T)
        assert got == expected and isinstance(got, int)

    def test_cascade_bootstrap_only(self):
        assert gram_ops_cascade(512, [], []) == 512 * 512

    def test_cascade_constant_r_closed_form(self):
        # with no removals the per-step count collapses to T*r
        T, r, L = 128, 20, 7
        total = gram_ops_cascade(T, [r] * (L - 1), [r] * (L - 1))
        assert total == T * T + (L - 1) * T * r

    def test_misaligned_sequences_rejected(self):
        with pytest.raises(ValueError):
            gram_ops_cascade(16, [4, 4], [4])

    def test_out_of_range_counts_rejected(self):
        with pytest.raises(ValueError):
            gram_ops_cascade(16, [20], [4])  # r > T
        with pytest.raises(ValueError):
            gram_ops_cascade(16, [4], [5])  # r_valid > r

    @given(
        T=st.integers(2, 256),
        L=st.integers(1, 12),
        data=st.data(),
    )
    @settings(max_examples=150, deadline=None)
    def test_cascade_never_exceeds_independent(self, T, L, data):
        rs = [data.draw(st.integers(1, T)) for _ in range(L - 1)]
        rvs = [data.draw(st.integers(1, r)) for r in rs]
        casc = gram_ops_cascade(T, rs, rvs)
        indep = gram_ops_independent(L, T)
        assert casc <= indep
        if casc == indep:
            assert L == 1 or all(r == T for r in rs)


class TestSelectionFlops:
    def test_reported_gptj_values(self):
        flops = selection_flops(CostModelInput(L=28, T=512, d=4096, d_h=256, h=16, r_bar=240))
        assert flops.independent == 30_064_771_072
        assert flops.cascade == 14_663_286_784
        assert f"{flops.independent / 1e9:.1f}" == "30.1"
        assert f"{flops.cascade / 1e9:.1f}" == "14.7"

    def test_reported_attention_value(self):
        flops = selection_flops(CostModelInput(L=28, T=512, d=4096, d_h=256, h=16, r_bar=205))
        assert flops.attention_compressed == 19_279_052_800
        assert f"{flops.attention_compressed / 1e9:.1f}" == "19.3"

    def test_reported_long_sequence_value(self):
        flops = selection_flops(CostModelInput(L=28, T=2048, d=4096, d_h=256, h=16, r_bar=240))
        assert flops.independent == 481_036_337_152
        assert f"{flops.independent / 1e9:.0f}" == "481"
        assert flops.cascade == 71_538_049_024  # ~71.5 GFLOP at T=2048

    def test_cascade_cheaper_whenever_compressed(self):
        rng = np.random.default_rng(80)
        for _ in range(100):
            L = int(rng.integers(2, 64))
            T = int(rng.integers(2, 2048))
            r = int(rng.integers(1, T))
            inp = CostModelInput(L=L, T=T, d=64, d_h=8, h=4, r_bar=r)
            flops = selection_flops(inp)
            assert flops.cascade < flops.independent

    def test_integer_exactness(self):
        flops = selection_flops(CostModelInput(L=3, T=10, d=7, d_h=2, h=2, r_bar=4))
        assert isinstance(flops.independent, int)
        assert isinstance(flops.cascade, int)
        assert isinstance(flops.attention_compressed, int)

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            CostModelInput(L=0, T=4, d=4, d_h=2, h=1, r_bar=2)
        with pytest.raises(ValueError):
            CostModelInput(L=1, T=4, d=4, d_h=2, h=1, r_bar=8)


class TestScalingTable:
    ROWS = [(512, 240), (1024, 280), (2048, 320), (4096, 380), (8192, 450)]

    def test_speedups_match_reported_digits(self):
        table = scaling_table(28, self.ROWS)
        printed = [f"{row.selection_speedup:.1f}" for row in table]
        assert printed == ["2.1", "3.7", "6.4", "10.8", "18.2"]

    def test_speedup_identity(self):
        for row in scaling_table(28, self.ROWS):
            assert abs(row.selection_speedup - row.T / row.r_bar_estimate) <= 1e-9

    def test_no_compression_row(self):
        row = scaling_table(28, [(512, 512)])[0]
        assert row.selection_speedup == 1.0
        assert row.savings_asymptotic == 0.0

    def test_exact_below_asymptotic_and_converges(self):
        for T, r in self.ROWS:
            asym = scaling_table(28, [(T, r)])[0]
            assert asym.savings_exact < asym.savings_asymptotic
            huge = scaling_table(10_000, [(T, r)])[0]
            assert abs(huge.savings_exact - huge.savings_asymptotic) <= 1e-3

    def test_r_bar_above_T_rejected(self):
        with pytest.raises(ValueError):
            scaling_table(28, [(512, 600)])


class TestCompressionSummary:
    def test_reported_linear_ratio(self):
        assert f"{compression_summary(512, 69)['linear_ratio']:.1f}" == "7.4"

    def test_reported_quadratic_ratios(self):
        assert f"{compression_summary(512, 262)['quadratic_ratio']:.1f}" == "3.8"
        assert f"{compression_summary(512, 237)['quadratic_ratio']:.1f}" == "4.7"

    def test_no_compression(self):
        out = compression_summary(100, 100)
        assert out["linear_ratio"] == 1.0 and out["quadratic_ratio"] == 1.0

    def test_bounds_enforced(self):
        with pytest.raises(ValueError):
            compression_summary(10, 0)
        with pytest.raises(ValueError):
            compression_summary(10, 11)
