import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quantal_defense import (
    DomainError,
    PrelecWeight,
    ProbabilityCurve,
    SecurityGame,
    TheoremCase,
    ValidationWarning,
    behavioral_optimal,
    expected_loss,
    optimal_allocation,
    perceived_loss,
    prelec,
    theorem_case,
    weighted_difference,
)

# mpmath (40 digits) references
PRELEC_001_HALF = 0.1169550008494578340
PERCEIVED_R5 = 0.1068779256603857510  # exp(-sqrt(5))
R_HAT_HALF = 6.531194401421725503  # A = 0.5, alpha = 0.5
R_HAT_THREE_HALVES = 4.097086510868923542  # A = 1.5, alpha = 0.5
R_STAR_HALF = 5.346573590279972655
R_STAR_THREE_HALVES = 4.797267445945917809

alphas = st.floats(0.01, 1.0)


class TestPrelec:
    def test_example(self):
        assert prelec(0.01, 0.5) == pytest.approx(PRELEC_001_HALF, rel=1e-14)

    @given(alphas)
    def test_endpoint_and_fixed_point(self, alpha):
        assert prelec(1.0, alpha) == 1.0
        assert prelec(math.exp(-1), alpha) == pytest.approx(math.exp(-1), rel=1e-14)

    def test_vanishes_at_zero(self):
        assert prelec(1e-300, 0.9) < 1e-100

    @given(alphas)
    def test_strictly_increasing(self, alpha):
        grid = np.linspace(0.001, 1.0, 400)
        w = np.array([prelec(p, alpha) for p in grid])
        assert np.all(np.diff(w) > 0)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
    def test_over_and_under_weighting(self, alpha):
        assert prelec(0.05, alpha) > 0.05
        assert prelec(0.9, alpha) < 0.9

    def test_identity_at_alpha_one(self):
        for p in (1e-9, 0.2, 0.77):
            assert prelec(p, 1.0) == p

    @pytest.mark.parametrize("p", [0.0, -0.1, math.nan, math.inf])
    def test_bad_probability(self, p):
        with pytest.raises(DomainError):
            prelec(p, 0.5)

    @pytest.mark.parametrize("alpha", [0.0, -1.0, 1.01, math.nan])
    def test_bad_alpha(self, alpha):
        with pytest.raises(DomainError):
            prelec(0.5, alpha)
        with pytest.raises(DomainError):
            PrelecWeight(alpha)

    def test_above_one_clamped_with_warning(self):
        with pytest.warns(ValidationWarning):
            assert prelec(1.3, 0.5) == 1.0

    def test_weight_object(self):
        assert PrelecWeight(0.5)(0.01) == prelec(0.01, 0.5)


class TestPerceivedLoss:
    def test_symmetric_example(self, game10):
        assert perceived_loss(game10, 0.5, 5.0) == pytest.approx(PERCEIVED_R5, rel=1e-14)

    def test_equalised_at_behavioural_optimum(self):
        game = SecurityGame(10.0, 0.5)
        a = prelec(game.p1(R_HAT_HALF), 0.5)
        b = 0.5 * prelec(game.p2(10 - R_HAT_HALF), 0.5)
        assert a == pytest.approx(b, abs=1e-6)

    @given(st.floats(0.0, 10.0), st.floats(0.1, 10.0))
    def test_alpha_one_is_true_loss(self, r, A):
        game = SecurityGame(10.0, A)
        assert perceived_loss(game, 1.0, r) == expected_loss(game, r)

    def test_scaled_curve_clamps(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidationWarning)
            curve = ProbabilityCurve(scale=math.exp(0.5))
            game = SecurityGame(10.0, 1.0, curve, curve)
        with pytest.warns(ValidationWarning):
            assert perceived_loss(game, 0.5, 0.1) == 1.0


class TestBehavioralOptimal:
    def test_equal_loss(self, game10):
        assert behavioral_optimal(game10, 0.5).r == pytest.approx(5.0, abs=1e-9)

    def test_low_loss(self):
        game = SecurityGame(10.0, 0.5)
        r_hat = behavioral_optimal(game, 0.5).r
        assert r_hat == pytest.approx(R_HAT_HALF, abs=1e-9)
        assert math.sqrt(r_hat) - math.sqrt(10 - r_hat) == pytest.approx(math.log(2), abs=1e-9)
        assert r_hat > optimal_allocation(game).r

    def test_high_loss(self):
        game = SecurityGame(10.0, 1.5)
        r_hat = behavioral_optimal(game, 0.5).r
        assert r_hat == pytest.approx(R_HAT_THREE_HALVES, abs=1e-9)
        assert r_hat < R_STAR_THREE_HALVES

    @given(st.floats(0.5, 12.0), st.floats(1e-3, 1e3))
    def test_alpha_one_matches_rational(self, R, A):
        game = SecurityGame(R, A)
        assert behavioral_optimal(game, 1.0).r == pytest.approx(optimal_allocation(game).r, abs=1e-9)

    @pytest.mark.parametrize("A,expected", [(1e-6, 3.0), (1e6, 0.0)])
    def test_corners(self, A, expected):
        assert behavioral_optimal(SecurityGame(3.0, A), 0.5).r == expected

    @given(st.floats(1.0, 12.0), st.floats(0.05, 20.0), st.floats(0.05, 1.0))
    def test_weighted_difference_decreasing(self, R, A, alpha):
        game = SecurityGame(R, A)
        d = [weighted_difference(game, alpha, r) for r in np.linspace(0, R, 200)]
        assert np.all(np.diff(d) < 0)


class TestTheoremCase:
    def test_equal(self, game10):
        assert theorem_case(game10, 0.7) is TheoremCase.EQUAL

    def test_hat_greater(self):
        game = SecurityGame(10.0, 0.5)
        assert game.p1(R_STAR_HALF) == pytest.approx(0.004764, rel=1e-3)
        assert theorem_case(game, 0.5) is TheoremCase.HAT_GREATER
        assert behavioral_optimal(game, 0.5).r > optimal_allocation(game).r

    def test_hat_less(self):
        assert theorem_case(SecurityGame(10.0, 1.5), 0.5) is TheoremCase.HAT_LESS

    def test_unclassified(self):
        game = SecurityGame(1.0, 2.0)
        r_star = optimal_allocation(game).r
        assert r_star == pytest.approx((1 - math.log(2)) / 2, abs=1e-9)
        assert game.p1(r_star) > math.exp(-1)
        assert theorem_case(game, 0.5) is TheoremCase.UNCLASSIFIED

    def test_corners(self):
        assert theorem_case(SecurityGame(3.0, 1e6), 0.5) is TheoremCase.CORNER_LOW
        assert theorem_case(SecurityGame(3.0, 1e-6), 0.5) is TheoremCase.CORNER_HIGH

    @pytest.mark.parametrize("alpha", [0.0, 1.0, 1.5])
    def test_needs_distorting_alpha(self, game10, alpha):
        with pytest.raises(DomainError):
            theorem_case(game10, alpha)

    def test_random_direction(self):
        rng = np.random.default_rng(3)
        checked = 0
        while checked < 200:
            game = SecurityGame(rng.uniform(4, 12), math.exp(rng.uniform(-2, 2)))
            alpha = rng.uniform(0.05, 0.95)
            r_star = optimal_allocation(game).r
            if not game.p1(r_star) < math.exp(-1):
                continue
            case = theorem_case(game, alpha)
            r_hat = behavioral_optimal(game, alpha).r
            # a constant-sign D_w puts r_hat at a corner, which agrees with the A-driven direction
            if game.loss_A < 1:
                assert case in (TheoremCase.HAT_GREATER, TheoremCase.CORNER_HIGH)
                assert r_hat > r_star
            else:
                assert case in (TheoremCase.HAT_LESS, TheoremCase.CORNER_LOW)
                assert r_hat < r_star
            checked += 1
