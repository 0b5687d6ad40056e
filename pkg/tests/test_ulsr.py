import numpy as np
import pytest

from coordrate.dsbs import f_of_t, interpolated_channel, t_star
from coordrate.measures import mutual_information, table_entropy
from coordrate.pmf import (
    AuxChannel,
    JointPmf,
    PmfError,
    aux_with_copy_sides,
    compose,
    degenerate_channel,
    dsbs_joint,
)
from coordrate.region import RateTriple, in_achievable_region
from coordrate.ulsr import UlsrForm, ulsr_objective, ulsr_rate
from coordrate.wyner import SolverOptions, wyner_ci

FAST = SolverOptions(restarts=10, seed=0)

C_01 = 0.872760566800152
MI_01 = 0.531004406410719
F_NEAR_MIN_01 = 0.300527573378146   # curve value next to the crossing point


class TestObjective:
    def test_degenerate_on_independent(self):
        q = JointPmf(np.outer([0.3, 0.7], [0.6, 0.4]))
        res = ulsr_objective(q, degenerate_channel(2, 2), UlsrForm.MAX_AVG)
        assert res.value == pytest.approx(0.0, abs=1e-12)

    def test_curve_row_a01(self):
        res = ulsr_objective(dsbs_joint(0.1), interpolated_channel(0.1, 0.636), UlsrForm.MAX_AVG)
        assert res.value == pytest.approx(0.462173752918356, abs=1e-12)

    def test_curve_row_a02(self):
        res = ulsr_objective(dsbs_joint(0.2), interpolated_channel(0.2, 0.4427), UlsrForm.MAX_AVG)
        assert res.value == pytest.approx(0.177497550666439, abs=1e-12)

    def test_accepts_form_string(self):
        res = ulsr_objective(dsbs_joint(0.1), degenerate_channel(2, 2), "maxpair")
        assert res.form is UlsrForm.MAX_PAIR
        assert res.value == pytest.approx(MI_01, abs=1e-12)

    def test_rejects_multi_aux_channel(self):
        aux = aux_with_copy_sides(degenerate_channel(2, 2), 2, 2)
        with pytest.raises(PmfError):
            ulsr_objective(dsbs_joint(0.1), aux, UlsrForm.MAX_AVG)

    def test_pointwise_dominance(self):
        # the averaged form never exceeds the pairwise max on any channel
        rng = np.random.default_rng(3)
        q = dsbs_joint(0.23)
        for _ in range(100):
            rows = rng.random((2, 2, 3))
            rows /= rows.sum(-1, keepdims=True)
            ch = AuxChannel.from_array(rows)
            avg = ulsr_objective(q, ch, UlsrForm.MAX_AVG).value
            pair = ulsr_objective(q, ch, UlsrForm.MAX_PAIR).value
            assert avg <= pair + 1e-12


class TestRateSolver:
    def test_independent_source_is_free(self):
        q = JointPmf(np.outer([0.4, 0.6], [0.25, 0.75]))
        res = ulsr_rate(q, UlsrForm.MAX_AVG, FAST)
        assert res.value <= 1e-6

    def test_dsbs_01_reaches_curve_minimum(self):
        res = ulsr_rate(dsbs_joint(0.1), UlsrForm.MAX_AVG, FAST)
        assert 0.25 <= res.value <= F_NEAR_MIN_01 + 1e-3
        assert res.value < min(0.5 * C_01, MI_01) - 0.01

    def test_forms_agree_on_dsbs(self):
        ra = ulsr_rate(dsbs_joint(0.2), UlsrForm.MAX_AVG, FAST)
        rp = ulsr_rate(dsbs_joint(0.2), UlsrForm.MAX_PAIR, FAST)
        assert abs(ra.value - rp.value) <= 1e-3

    def test_forms_agree_on_random_sources(self):
        rng = np.random.default_rng(13)
        opts = SolverOptions(restarts=12, seed=4)
        for shape in ((2, 2), (2, 3)):
            m = rng.random(shape) ** 2
            q = JointPmf(m / m.sum())
            ra = ulsr_rate(q, UlsrForm.MAX_AVG, opts)
            rp = ulsr_rate(q, UlsrForm.MAX_PAIR, opts)
            assert abs(ra.value - rp.value) <= 1e-3

    def test_upper_bound_half_wyner_and_mi(self):
        opts = SolverOptions(restarts=12, seed=4)
        rng = np.random.default_rng(29)
        for _ in range(3):
            m = rng.random((2, 2)) ** 2
            q = JointPmf(m / m.sum())
            res = ulsr_rate(q, UlsrForm.MAX_AVG, opts)
            w = wyner_ci(q, opts=opts)
            full = compose(q, degenerate_channel(2, 2))
            ixy = mutual_information(full, ("x",), ("y",))
            assert res.value <= min(0.5 * w.value, ixy) + 1e-6

    def test_value_consistent_with_terms(self):
        res = ulsr_rate(dsbs_joint(0.3), UlsrForm.MAX_AVG, FAST)
        assert res.value == pytest.approx(
            max(res.term_cond, 0.5 * (res.term_cond + res.term_joint)), abs=1e-9
        )

    def test_deterministic(self):
        opts = SolverOptions(restarts=8, seed=77)
        r1 = ulsr_rate(dsbs_joint(0.2), UlsrForm.MAX_AVG, opts)
        r2 = ulsr_rate(dsbs_joint(0.2), UlsrForm.MAX_AVG, opts)
        assert r1.value == r2.value
        for cell in r1.channel.cond:
            assert np.array_equal(r1.channel.row(*cell), r2.channel.row(*cell))

    def test_terms_cross_near_optimum_on_dsbs(self):
        res = ulsr_rate(dsbs_joint(0.1), UlsrForm.MAX_AVG, FAST)
        assert abs(res.term_cond - res.term_joint) <= 5e-3

    def test_achievability_via_region(self):
        # the solver's channel extended with identity side information
        # certifies (value + eps, L, L) inside the inner bound
        q = dsbs_joint(0.2)
        res = ulsr_rate(q, UlsrForm.MAX_AVG, FAST)
        aux = aux_with_copy_sides(res.channel, 2, 2)
        L = table_entropy(q.probs) + 1.0
        assert in_achievable_region(q, aux, RateTriple(res.value + 1e-9, L, L))

    def test_strict_improvement_both_sources(self):
        for a in (0.1, 0.2):
            q = dsbs_joint(a)
            res = ulsr_rate(q, UlsrForm.MAX_AVG, FAST)
            w = wyner_ci(q, card_u=2, opts=FAST)
            ixy = mutual_information(compose(q, degenerate_channel(2, 2)), ("x",), ("y",))
            assert res.value < min(0.5 * w.value, ixy) - 0.01
            # and it lands at the interpolated family's own minimum
            assert res.value <= f_of_t(a, t_star(a)).f + 1e-3
