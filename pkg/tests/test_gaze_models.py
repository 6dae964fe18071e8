import math

import numpy as np
import pytest
from scipy import stats

from gazecoop.errors import (
    DegenerateDesignError,
    InsufficientDataError,
    InvalidModelError,
    SeparationError,
)
from gazecoop.gaze_models import (
    LOOKING,
    POINTING,
    GazeObservation,
    LinearErrorModel,
    TrackabilityModel,
    build_model_report,
    cross_validate_threshold,
    fit_linear,
    fit_logistic,
    fit_trackability,
    predict_error,
    predict_tracked_prob,
    read_observations_csv,
    remove_outliers,
    summarize_pointing_error,
    trackable_limit,
    write_observations_csv,
)

STUDY_BETA0 = 5.407
STUDY_BETA1 = -0.177


def looking_obs(x, tracked, err=None):
    return GazeObservation(x, tracked, err if tracked else None, LOOKING)


def synth_tracked(xs, errs, phase=LOOKING):
    return [GazeObservation(float(x), True, float(e), phase) for x, e in zip(xs, errs)]


def synth_logistic(n, seed, beta0=STUDY_BETA0, beta1=STUDY_BETA1, hi=60.0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, hi, n)
    p = 1.0 / (1.0 + np.exp(-(beta0 + beta1 * x)))
    tracked = rng.random(n) < p
    return [
        GazeObservation(float(xi), bool(t), 1.0 if t else None, LOOKING)
        for xi, t in zip(x, tracked)
    ]


class TestRemoveOutliers:
    def test_all_equal(self):
        kept, frac = remove_outliers([3.0] * 10)
        assert kept == [3.0] * 10
        assert frac == 0.0

    def test_single_far_point(self):
        # mean 20, population SD 40: the 100 sits exactly 2 SDs out
        kept, frac = remove_outliers([0, 0, 0, 0, 100])
        assert kept == [0, 0, 0, 0]
        assert frac == pytest.approx(0.2)

    def test_gaussian_fraction(self):
        rng = np.random.default_rng(123)
        kept, frac = remove_outliers(rng.normal(size=10_000))
        assert abs(frac - 0.046) < 0.01

    def test_too_few(self):
        with pytest.raises(InsufficientDataError):
            remove_outliers([1.0, 2.0])

    def test_single_pass_is_stable(self):
        values = [0, 0, 0, 0, 100.0]
        kept, _ = remove_outliers(values)
        mean = np.mean(values)
        sd = np.std(values)
        assert all(abs(v - mean) < 2 * sd for v in kept)


class TestFitLinear:
    def test_noiseless_recovery(self):
        x = np.linspace(0, 40, 50)
        obs = synth_tracked(x, 1.243 + 0.032 * x)
        m = fit_linear(obs)
        assert abs(m.c1 - 1.243) < 1e-9
        assert abs(m.c2 - 0.032) < 1e-9
        assert m.r_squared == pytest.approx(1.0)

    def test_constant_error(self):
        obs = synth_tracked([0, 10, 20, 30], [2.0, 2.0, 2.0, 2.0])
        m = fit_linear(obs)
        assert m.c2 == pytest.approx(0.0)
        assert m.c1 == pytest.approx(2.0)

    def test_noisy_recovery_within_sampling_bound(self):
        # 3 standard errors at N=700, sigma=0.8, dphi ~ U[0, 40]
        rng = np.random.default_rng(42)
        x = rng.uniform(0, 40, 700)
        y = np.abs(1.243 + 0.032 * x + rng.normal(0, 0.8, 700))
        m = fit_linear(synth_tracked(x, y))
        assert abs(m.c2 - 0.032) < 0.008

    def test_degenerate_design(self):
        with pytest.raises(DegenerateDesignError):
            fit_linear(synth_tracked([5, 5, 5], [1, 2, 3]))

    def test_stats_match_reference(self):
        rng = np.random.default_rng(9)
        x = rng.uniform(0, 30, 40)
        y = np.abs(1.0 + 0.05 * x + rng.normal(0, 0.4, 40))
        m = fit_linear(synth_tracked(x, y))
        ref = stats.linregress(x, y)
        assert m.c2 == pytest.approx(ref.slope, abs=1e-12)
        assert m.c1 == pytest.approx(ref.intercept, abs=1e-12)
        assert m.p_value == pytest.approx(ref.pvalue, abs=1e-9)
        assert m.r_squared == pytest.approx(ref.rvalue**2, abs=1e-9)

    def test_filters_by_phase_and_tracked(self):
        x = np.linspace(0, 40, 30)
        obs = synth_tracked(x, 1.0 + 0.1 * x)
        obs += [looking_obs(5.0, False)]
        obs += synth_tracked(x, 5.0 + 0.0 * x, phase=POINTING)
        m = fit_linear(obs, phase=LOOKING, tracked=True)
        assert m.n == 30
        assert abs(m.c2 - 0.1) < 1e-9


class TestPredictError:
    def test_study_value_at_limit(self):
        m = LinearErrorModel(c1=1.243, c2=0.032)
        assert predict_error(m, 27.0) == pytest.approx(2.107, abs=1e-12)

    def test_intercept(self):
        m = LinearErrorModel(c1=1.243, c2=0.032)
        assert predict_error(m, 0.0) == pytest.approx(1.243)

    def test_unit_slope(self):
        assert predict_error(LinearErrorModel(0.0, 1.0), 5.0) == 5.0

    def test_negative_shift_rejected(self):
        with pytest.raises(ValueError):
            predict_error(LinearErrorModel(1.0, 0.0), -1.0)


class TestFitLogistic:
    def test_no_effect_case(self):
        rng = np.random.default_rng(5)
        obs = [
            looking_obs(float(x), bool(t), 1.0)
            for x, t in zip(rng.uniform(0, 50, 4000), rng.random(4000) < 0.7)
        ]
        fit = fit_logistic(obs)
        assert abs(fit.beta1) < 0.01
        assert abs(fit.beta0 - math.log(0.7 / 0.3)) < 0.2

    def test_monte_carlo_recovery(self):
        obs = synth_logistic(10_000, seed=7)
        fit = fit_logistic(obs)
        assert fit.converged
        assert abs(fit.beta0 - STUDY_BETA0) / abs(STUDY_BETA0) < 0.05
        assert abs(fit.beta1 - STUDY_BETA1) / abs(STUDY_BETA1) < 0.05

    def test_matches_sklearn(self):
        pytest.importorskip("sklearn")
        from sklearn.linear_model import LogisticRegression

        obs = synth_logistic(2000, seed=21)
        fit = fit_logistic(obs)
        x = np.array([[o.delta_phi_deg] for o in obs])
        y = np.array([int(o.tracked) for o in obs])
        ref = LogisticRegression(penalty=None, max_iter=2000).fit(x, y)
        assert fit.beta0 == pytest.approx(ref.intercept_[0], abs=1e-4)
        assert fit.beta1 == pytest.approx(ref.coef_[0][0], abs=1e-5)

    def test_separation_detected(self):
        obs = [looking_obs(x, x < 10, 1.0 if x < 10 else None) for x in np.linspace(0, 20, 40)]
        with pytest.raises(SeparationError):
            fit_logistic(obs)

    def test_single_class_rejected(self):
        obs = [looking_obs(float(x), True, 1.0) for x in range(10)]
        with pytest.raises(InsufficientDataError):
            fit_logistic(obs)

    def test_unpacks_as_pair(self):
        beta0, beta1 = fit_logistic(synth_logistic(500, seed=3))
        assert isinstance(beta0, float) and isinstance(beta1, float)


class TestPredictTrackedProb:
    def model(self, beta0=STUDY_BETA0, beta1=STUDY_BETA1, dp=0.65):
        return TrackabilityModel(beta0, beta1, dp, cv_accuracy=0.85)

    def test_study_probability_at_zero(self):
        assert predict_tracked_prob(self.model(), 0.0) == pytest.approx(0.9955, abs=1e-3)

    def test_zero_intercept(self):
        m = TrackabilityModel(0.0, -0.1, 0.5, cv_accuracy=0.5)
        assert predict_tracked_prob(m, 0.0) == pytest.approx(0.5)

    def test_decision_point_crossing(self):
        assert predict_tracked_prob(self.model(), 27.05) == pytest.approx(0.65, abs=1e-3)

    def test_monotone_decreasing(self):
        m = self.model()
        probs = [predict_tracked_prob(m, x) for x in np.linspace(0, 80, 200)]
        assert all(a > b for a, b in zip(probs, probs[1:]))


class TestCrossValidateThreshold:
    def test_clean_separation(self):
        # tracked iff below 20 degrees, steep true model
        obs = synth_logistic(400, seed=2, beta0=40.0, beta1=-2.0, hi=40.0)
        dp, acc = cross_validate_threshold(obs, seed=0)
        assert acc > 0.97

    def test_paper_like_band(self):
        obs = synth_logistic(330, seed=11)
        dp, acc = cross_validate_threshold(obs, seed=3)
        assert 0.25 <= dp <= 0.75
        assert 0.80 <= acc <= 0.90

    def test_deterministic_per_seed(self):
        obs = synth_logistic(330, seed=11)
        assert cross_validate_threshold(obs, seed=3) == cross_validate_threshold(obs, seed=3)

    def test_all_positive_labels(self):
        obs = [looking_obs(float(x), True, 1.0) for x in range(50)]
        dp, acc = cross_validate_threshold(obs, seed=0)
        assert dp == pytest.approx(0.75)
        assert acc == pytest.approx(1.0)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientDataError):
            cross_validate_threshold([looking_obs(1.0, True, 1.0)], k=5)


class TestTrackableLimit:
    def test_study_limit(self):
        m = TrackabilityModel(STUDY_BETA0, STUDY_BETA1, 0.65, cv_accuracy=0.856)
        assert trackable_limit(m) == pytest.approx(27.05, abs=0.1)

    def test_boundary_at_origin(self):
        beta0 = math.log(0.65 / 0.35)
        m = TrackabilityModel(beta0, -0.2, 0.65, cv_accuracy=0.5)
        assert trackable_limit(m) == pytest.approx(0.0, abs=1e-12)

    def test_positive_slope_rejected(self):
        with pytest.warns(UserWarning):
            m = TrackabilityModel(1.0, 0.1, 0.5, cv_accuracy=0.5)
        with pytest.raises(InvalidModelError):
            trackable_limit(m)

    def test_limit_inverts_probability(self):
        m = TrackabilityModel(STUDY_BETA0, STUDY_BETA1, 0.65, cv_accuracy=0.856)
        assert predict_tracked_prob(m, trackable_limit(m)) == pytest.approx(0.65, abs=1e-9)


class TestSummarizePointingError:
    def test_constant_samples(self):
        obs = synth_tracked([1, 2, 3], [2.0, 2.0, 2.0], phase=POINTING)
        s = summarize_pointing_error(obs)
        assert s.mean == pytest.approx(2.0)
        assert s.ci_low == pytest.approx(2.0)
        assert s.ci_high == pytest.approx(2.0)

    def test_textbook_t_interval(self):
        s = summarize_pointing_error(synth_tracked([0, 1, 2], [1.0, 2.0, 3.0], phase=POINTING))
        half_width = stats.t.ppf(0.975, 2) * np.std([1, 2, 3], ddof=1) / math.sqrt(3)
        assert half_width == pytest.approx(2.4841, abs=1e-3)
        assert s.mean == pytest.approx(2.0)
        assert s.ci_high - s.mean == pytest.approx(half_width, abs=1e-9)

    def test_study_scale_resample(self):
        # sigma back-solved from the reported interval half-width at n=331
        rng = np.random.default_rng(17)
        errs = np.abs(rng.normal(1.99, 1.53, 331))
        s = summarize_pointing_error(synth_tracked(np.ones(331), errs, phase=POINTING))
        assert s.ci_low <= 1.99 + 0.1 and s.ci_high >= 1.99 - 0.1
        assert s.n == 331

    def test_too_few(self):
        with pytest.raises(InsufficientDataError):
            summarize_pointing_error(synth_tracked([1], [1.0], phase=POINTING))


class TestCsvAndReport:
    def test_round_trip(self, tmp_path):
        obs = synth_logistic(60, seed=4) + synth_tracked([1, 2], [0.5, 0.7], phase=POINTING)
        path = tmp_path / "obs.csv"
        write_observations_csv(path, obs)
        loaded = read_observations_csv(path)
        assert loaded == obs

    def test_untracked_rows_have_empty_error(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text(
            "delta_phi_deg,error_deg,tracked,phase\n"
            "10.0,,false,looking\n"
            "5.0,1.25,true,pointing\n"
        )
        loaded = read_observations_csv(path)
        assert loaded[0].tracked is False and loaded[0].error_deg is None
        assert loaded[1].error_deg == 1.25

    def test_missing_column_rejected(self, tmp_path):
        path = tmp_path / "obs.csv"
        path.write_text("delta_phi_deg,error_deg\n1.0,2.0\n")
        with pytest.raises(ValueError):
            read_observations_csv(path)

    def test_inconsistent_tracked_error(self):
        with pytest.raises(ValueError):
            GazeObservation(1.0, True, None, LOOKING)
        with pytest.raises(ValueError):
            GazeObservation(1.0, False, 2.0, LOOKING)

    def test_report_fields(self):
        # looking set with model-consistent errors on tracked samples
        rng = np.random.default_rng(31)
        x = rng.uniform(0, 60, 600)
        p = 1.0 / (1.0 + np.exp(-(STUDY_BETA0 + STUDY_BETA1 * x)))
        tracked = rng.random(600) < p
        obs = [
            GazeObservation(
                float(xi),
                bool(t),
                abs(1.243 + 0.032 * xi + rng.normal(0, 0.5)) if t else None,
                LOOKING,
            )
            for xi, t in zip(x, tracked)
        ]
        pointing = synth_tracked(
            np.zeros(100), np.abs(rng.normal(1.99, 1.5, 100)), phase=POINTING
        )
        report = build_model_report(obs + pointing, seed=1)
        lin = report["linear_error_model"]
        trk = report["trackability_model"]
        assert abs(lin["c1_deg"] - 1.243) < 0.3
        assert abs(lin["c2_deg_per_deg"] - 0.032) < 0.01
        assert trk["trackable_limit_deg"] is not None
        assert trk["cone_tip_angle_deg"] == pytest.approx(2 * trk["trackable_limit_deg"])
        # the 2-SD trim runs inside the pointing subset before summarizing
        assert 90 <= report["pointing_error"]["n"] <= 100

    def test_trackability_pipeline(self):
        obs = synth_logistic(1000, seed=13)
        model = fit_trackability(obs, seed=5)
        assert model.beta1 < 0
        assert 0.25 <= model.decision_point <= 0.75
        assert 0.0 <= model.cv_accuracy <= 1.0
        assert not math.isnan(model.refit_accuracy)
