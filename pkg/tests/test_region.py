import numpy as np
import pytest

from coordrate.measures import binary_entropy, mutual_information
from coordrate.pmf import (
    JointPmf,
    PmfError,
    aux_with_copy_sides,
    compose,
    degenerate_channel,
    dsbs_joint,
)
from coordrate.region import (
    RateTriple,
    achievable_bounds,
    check_markov_quadruple,
    in_achievable_region,
    xy_equal_region,
)
from coordrate.wyner import dsbs_wyner_channel

MI_02 = 0.278071905112638
C_01 = 0.872760566800152


def copy_sides_aux(nx=2, ny=2):
    return aux_with_copy_sides(degenerate_channel(nx, ny), nx, ny)


class TestRateTriple:
    def test_rejects_negative(self):
        with pytest.raises(PmfError):
            RateTriple(-0.1, 0.0, 0.0)

    def test_rejects_nan(self):
        with pytest.raises(PmfError):
            RateTriple(float("nan"), 0.0, 0.0)


class TestMarkovQuadruple:
    def test_copy_sides_always_chain(self):
        # u1 = x and u2 = y satisfy the chain for any middle auxiliary
        for a in (0.1, 0.2, 0.4):
            full = compose(dsbs_joint(a), copy_sides_aux())
            ok, defect = check_markov_quadruple(full)
            assert ok and defect <= 1e-12

    def test_wyner_channel_chain(self):
        full = compose(dsbs_joint(0.1), dsbs_wyner_channel(0.1))
        ok, defect = check_markov_quadruple(full, tol=1e-9)
        assert ok and defect <= 1e-9

    def test_bare_dependent_source_fails(self):
        full = compose(dsbs_joint(0.2), degenerate_channel(2, 2))
        ok, defect = check_markov_quadruple(full)
        assert not ok
        # both factorization links are broken, each contributing I(X;Y)
        assert defect == pytest.approx(2 * MI_02, abs=1e-12)


class TestAchievableBounds:
    def test_degenerate_on_independent(self):
        q = JointPmf(np.outer([0.3, 0.7], [0.2, 0.8]))
        b = achievable_bounds(q, degenerate_channel(2, 2))
        for name in ("b_r_r1", "b_r_r2", "b_r", "b_r_r1_r2", "b_2r_r1_r2", "b_2r"):
            assert getattr(b, name) == pytest.approx(0.0, abs=1e-12)

    def test_copy_sides_on_dsbs02(self):
        b = achievable_bounds(dsbs_joint(0.2), copy_sides_aux())
        assert b.b_r == pytest.approx(MI_02, abs=1e-9)
        assert b.b_r_r1 == pytest.approx(1.0, abs=1e-9)
        assert b.b_r_r2 == pytest.approx(1.0, abs=1e-9)
        # I(X;Y) + H(X,Y) with H(X,Y) = 1 + h(0.2)
        assert b.b_r_r1_r2 == pytest.approx(MI_02 + 1 + binary_entropy(0.2), abs=1e-9)
        assert b.b_r_r1_r2 == pytest.approx(2.0, abs=1e-9)

    def test_wyner_channel_bounds(self):
        b = achievable_bounds(dsbs_joint(0.1), dsbs_wyner_channel(0.1))
        assert b.b_r == pytest.approx(0.0, abs=1e-9)
        assert b.b_r_r1 == pytest.approx(C_01, abs=1e-9)
        assert b.b_r_r2 == pytest.approx(C_01, abs=1e-9)
        assert b.b_2r == pytest.approx(C_01, abs=1e-9)

    def test_rejects_non_chain_channel(self):
        # a middle auxiliary that copies neither side leaves X and Y coupled
        with pytest.raises(PmfError):
            achievable_bounds(dsbs_joint(0.2), degenerate_channel(2, 2))


class TestMembership:
    def test_documented_triples(self):
        q = dsbs_joint(0.2)
        aux = copy_sides_aux()
        assert in_achievable_region(q, aux, RateTriple(0.28, 0.9, 0.9)) is True
        assert in_achievable_region(q, aux, RateTriple(0.27, 0.9, 0.9)) is False

    def test_independent_zero_rates(self):
        q = JointPmf(np.outer([0.5, 0.5], [0.5, 0.5]))
        assert in_achievable_region(q, degenerate_channel(2, 2), RateTriple(0, 0, 0))

    def test_upward_closure(self):
        q = dsbs_joint(0.2)
        aux = copy_sides_aux()
        base = RateTriple(0.28, 1.0, 1.0)
        assert in_achievable_region(q, aux, base)
        rng = np.random.default_rng(8)
        for _ in range(1000):
            d = rng.random(3)
            bigger = RateTriple(base.r + d[0], base.r1 + d[1], base.r2 + d[2])
            assert in_achievable_region(q, aux, bigger)

    def test_markov_middle_allows_zero_side_rates(self):
        # any chain-satisfying middle auxiliary puts (I(X,Y;U) + eps, 0, 0) inside
        q = dsbs_joint(0.1)
        ch = dsbs_wyner_channel(0.1)
        i_u = mutual_information(compose(q, ch), ("x", "y"), ("u",))
        assert in_achievable_region(q, ch, RateTriple(i_u + 1e-9, 0.0, 0.0))

    def test_boundary_has_slack(self):
        q = dsbs_joint(0.2)
        aux = copy_sides_aux()
        b = achievable_bounds(q, aux)
        exact = RateTriple(b.b_r, 1.0, 1.0)
        assert in_achievable_region(q, aux, exact)


class TestXyEqualRegion:
    def test_corner_point(self):
        assert xy_equal_region(1.0, RateTriple(0.5, 0.5, 0.5)) is True

    def test_below_half_entropy(self):
        assert xy_equal_region(1.0, RateTriple(0.49, 10, 10)) is False

    def test_constant_source(self):
        assert xy_equal_region(0.0, RateTriple(0, 0, 0)) is True

    def test_matches_bruteforce_grid(self):
        hx = 1.0
        grid = np.arange(0.0, 1.5 + 1e-9, 0.01)
        for r in grid:
            for r1 in (0.0, 0.25, 0.5, 0.75, 1.0):
                for r2 in (0.0, 0.5, 1.0):
                    expect = (r + min(r1, r2) >= hx - 1e-12) and (r >= hx / 2 - 1e-12)
                    assert xy_equal_region(hx, RateTriple(r, r1, r2)) == expect

    def test_rejects_negative_entropy(self):
        with pytest.raises(PmfError):
            xy_equal_region(-1.0, RateTriple(1, 1, 1))
