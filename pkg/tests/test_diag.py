import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nurs import diag as D
from nurs.direction import BlockShuffle, LocalCycle, UniformSn
from nurs.kernel import NursParams, StopReason, TransitionRecord, run_chain
from nurs.metric import MallowsModel
from nurs.perm import Permutation, fisher_yates, identity
from nurs.rng import make_rng

from oracles import beta0_index_law


class TestPoisson:
    def test_values(self):
        assert D.poisson_pmf(1.0, 0) == pytest.approx(math.exp(-1), rel=1e-15)
        assert D.poisson_pmf(1.0, 1) == pytest.approx(math.exp(-1), rel=1e-15)
        assert D.poisson_pmf(2.0, -1) == 0

    @pytest.mark.parametrize("lam", [0.3, 1.0, math.e, 5.0])
    def test_normalized(self, lam):
        assert abs(math.fsum(D.poisson_support(lam, 50).values()) - 1) <= 1e-12

    def test_bad_rate(self):
        with pytest.raises(ValueError):
            D.poisson_pmf(0.0, 1)


class TestTriangular:
    def test_examples(self):
        assert D.triangular_pmf(7, 0, "wide") == pytest.approx(129 / 16641, rel=1e-15)
        assert D.triangular_pmf(7, 0, "derived") == 128 / 16384
        assert D.triangular_pmf(7, 128, "derived") == 0
        assert D.triangular_pmf(7, 128, "wide") > 0

    @pytest.mark.parametrize("variant", D.TRIANGULAR_VARIANTS)
    @pytest.mark.parametrize("M", [0, 1, 3, 7])
    def test_normalized(self, M, variant):
        assert abs(math.fsum(D.triangular_support(M, variant).values()) - 1) <= 1e-12

    @pytest.mark.parametrize("M", [1, 2, 3, 5, 7])
    def test_derived_is_the_enumerated_law(self, M):
        # eps small enough that every beta = 0 orbit reaches 2^M
        law = beta0_index_law(M, 1e-3)
        for k, p in D.triangular_support(M, "derived").items():
            assert float(law.get(k, 0)) == pytest.approx(p, abs=1e-15)

    def test_errors(self):
        with pytest.raises(ValueError):
            D.triangular_pmf(3, 9)
        with pytest.raises(ValueError):
            D.triangular_pmf(3, 0, "other")


class TestHistogram:
    def test_from_values(self):
        h = D.Histogram.from_values([1, 1, 2, 5])
        assert h.as_dict() == {1: 2, 2: 1, 5: 1}
        assert h.total == 4
        assert h.empirical(3) == 0

    def test_total_invariant(self):
        with pytest.raises(ValueError):
            D.Histogram(np.array([0]), np.array([3]), 4)

    def test_tv_examples(self):
        assert D.empirical_tv(D.Histogram.from_values([0]), {0: 0.5, 1: 0.5}) == 0.5
        assert D.empirical_tv(D.Histogram.from_values([0, 1]), {0: 0.5, 1: 0.5}) == 0
        # pmf mass on an empty bin counts
        assert D.empirical_tv(D.Histogram.from_values([0, 0]), {0: 0.5, 2: 0.5}) == 0.5

    def test_tv_shrinks_with_samples(self):
        rng = make_rng(30)
        pmf = D.poisson_support(1.0, 40)
        small = D.empirical_tv(D.Histogram.from_values(rng.poisson(1.0, 100)), pmf)
        large = D.empirical_tv(D.Histogram.from_values(rng.poisson(1.0, 200_000)), pmf)
        assert large < 0.01 < small + 0.01

    def test_rows(self):
        rows = list(D.histogram_rows(D.Histogram.from_values([0, 0, 2]), {0: 0.5, 1: 0.5}))
        assert [r[0] for r in rows] == [0, 1, 2]
        assert rows[1][1] == 0 and rows[1][3] == 0.5

    @given(st.lists(st.integers(-5, 5), min_size=1, max_size=50))
    def test_tv_in_unit_interval(self, values):
        tv = D.empirical_tv(D.Histogram.from_values(values), {0: 1.0})
        assert 0 <= tv <= 1


def _records(count):
    return [TransitionRecord(k, 4, StopReason.STOP, 2) for k in range(count)]


class TestTraceStats:
    def test_identity_states(self):
        n = 6
        t = D.trace_stats([identity(n)] * 3, _records(3), MallowsModel(n, 1.0, "kendall"))
        assert np.all(t.fixed_points == n) and np.all(t.lis == n) and np.all(t.cycle_len_1 == 1)
        assert np.all(t.energy == 0)
        assert list(t.signed_index) == [0, 1, 2]
        assert list(t.iteration) == [1, 2, 3]

    def test_reversal(self):
        rev = Permutation([5, 4, 3, 2, 1])
        t = D.trace_stats([rev], _records(1), MallowsModel(5, 1.0, "kendall"))
        assert t.lis[0] == 1
        assert t.energy[0] == 10
        assert t.fixed_points[0] == 1
        assert t.cycle_len_1[0] == 2

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            D.trace_stats([identity(3)], _records(2), MallowsModel(3, 1.0, "l1"))

    def test_increasing_iterations(self):
        with pytest.raises(ValueError):
            D.trace_stats([identity(3)] * 2, _records(2), MallowsModel(3, 1.0, "l1"), [2, 2])

    def test_csv_round_trip(self, tmp_path):
        model = MallowsModel(8, 0.5, "hamming")
        res = run_chain(model, UniformSn(), NursParams(0.01, 4), 50, make_rng(31), burnin=10)
        trace = D.RunTrace.from_chain(res)
        buf = io.StringIO()
        trace.to_csv(buf, comment="test header")
        text = buf.getvalue()
        assert text.startswith("# test header\n")
        assert text.splitlines()[1] == ",".join(D.TRACE_COLUMNS)
        path = tmp_path / "trace.csv"
        path.write_text(text)
        back = D.RunTrace.read_csv(path)
        for name in D.TRACE_COLUMNS:
            assert np.array_equal(back.column(name), trace.column(name))

    def test_chain_columns_match_states(self):
        model = MallowsModel(7, 0.8, "ulam")
        res = run_chain(model, LocalCycle(3), NursParams(0.05, 3), 40, make_rng(32), keep_states=True)
        states = [Permutation.from_array(s) for s in res.states]
        trace = D.RunTrace.from_chain(res)
        ref = D.trace_stats(states, _records(len(states)), model, trace.iteration)
        for name in ("energy", "fixed_points", "cycle_len_1", "lis"):
            assert np.array_equal(ref.column(name), trace.column(name))


class TestEss:
    def test_iid(self):
        x = make_rng(33).normal(size=20_000)
        acf, ess = D.autocorr_ess(x, 50)
        assert acf[0] == 1
        assert abs(ess - len(x)) <= 0.2 * len(x)

    def test_constant(self):
        acf, ess = D.autocorr_ess(np.ones(100), 10)
        assert ess == 100
        assert list(acf) == [1.0] + [0.0] * 10

    def test_alternating(self):
        acf, _ = D.autocorr_ess(np.tile([1.0, -1.0], 500), 5)
        assert acf[1] == pytest.approx(-1, abs=0.01)

    def test_ar1(self):
        rng = make_rng(34)
        phi, size = 0.8, 100_000
        x = np.empty(size)
        x[0] = 0
        noise = rng.normal(size=size)
        for t in range(1, size):
            x[t] = phi * x[t - 1] + noise[t]
        _, ess = D.autocorr_ess(x, 200)
        assert ess / size == pytest.approx((1 - phi) / (1 + phi), rel=0.15)

    def test_too_short(self):
        with pytest.raises(ValueError):
            D.autocorr_ess([1.0, 2.0], 2)


class TestBetaZeroChains:
    @pytest.mark.parametrize("law", [UniformSn(), BlockShuffle(3), LocalCycle(4)])
    @pytest.mark.parametrize("kind", ["cayley", "l2"])
    def test_fixed_point_mean(self, law, kind):
        model = MallowsModel(12, 0.0, kind)
        res = run_chain(model, law, NursParams(0.01, 7), 60_000, make_rng(35), burnin=5_000)
        fp = res.column("fixed_points").astype(float)
        _, ess = D.autocorr_ess(fp, 500)
        se = fp.std() / math.sqrt(ess)
        assert abs(fp.mean() - 1.0) <= 4 * se

    def test_orbit_lengths(self):
        model = MallowsModel(20, 0.0, "kendall")
        res = run_chain(model, UniformSn(), NursParams(0.01, 7), 2_000, make_rng(36))
        assert np.all(res.column("orbit_len") == 128)
        assert set(res.stop_reasons()) == {StopReason.STOP}
