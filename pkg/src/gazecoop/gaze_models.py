"""Fitting and evaluation of the gaze accuracy-study models.

Covers outlier trimming, the linear angular-error model, the logistic
trackability model with cross-validated decision point, and the derived
trackable-cone limit.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import expit

from .errors import (
    DegenerateDesignError,
    InsufficientDataError,
    InvalidModelError,
    SeparationError,
)

LOOKING = "looking"
POINTING = "pointing"

SEPARATION_COEF_LIMIT = 1e4
IRLS_TOL = 1e-10
IRLS_MAX_ITER = 100


@dataclass(frozen=True)
class GazeObservation:
    """One targeting iteration: gaze shift, tracking flag and angular error.

    ``error_deg`` is present iff the sample was tracked.
    """

    delta_phi_deg: float
    tracked: bool
    error_deg: float | None = None
    phase: str = LOOKING

    def __post_init__(self):
        object.__setattr__(self, "delta_phi_deg", float(self.delta_phi_deg))
        if self.error_deg is not None:
            object.__setattr__(self, "error_deg", float(self.error_deg))
        if not math.isfinite(self.delta_phi_deg) or self.delta_phi_deg < 0:
            raise ValueError(f"delta_phi_deg must be finite and >= 0, got {self.delta_phi_deg}")
        if self.tracked != (self.error_deg is not None):
            raise ValueError("error_deg must be present exactly when tracked")
        if self.error_deg is not None and self.error_deg < 0:
            raise ValueError(f"error_deg must be >= 0, got {self.error_deg}")
        if self.phase not in (LOOKING, POINTING):
            raise ValueError(f"unknown phase {self.phase!r}")


@dataclass(frozen=True)
class LinearErrorModel:
    """Angular error as a linear function of gaze shift."""

    c1: float  # intercept, degrees
    c2: float  # slope, degrees per degree
    p_value: float = float("nan")  # two-sided t-test on the slope
    r_squared: float = float("nan")
    n: int = 0


@dataclass(frozen=True)
class LogisticFit:
    """Raw logistic coefficients plus convergence diagnostics.

    Iterable so callers can unpack ``beta0, beta1 = fit_logistic(...)``.
    """

    beta0: float
    beta1: float
    converged: bool
    iterations: int
    log_likelihood: float

    def __iter__(self):
        return iter((self.beta0, self.beta1))


@dataclass(frozen=True)
class TrackabilityModel:
    """Logistic trackability model with its cross-validated decision point."""

    beta0: float
    beta1: float
    decision_point: float
    cv_accuracy: float  # mean held-out accuracy at the decision point
    refit_accuracy: float = float("nan")  # accuracy of the all-data refit
    converged: bool = True

    def __post_init__(self):
        if not 0.0 < self.decision_point < 1.0:
            raise ValueError("decision_point must lie in (0, 1)")
        if self.beta1 >= 0:
            warnings.warn(
                "trackability slope is non-negative; tracking should degrade "
                "with gaze shift",
                stacklevel=2,
            )


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    ci_low: float
    ci_high: float
    n: int

    def __post_init__(self):
        if not self.ci_low <= self.mean <= self.ci_high:
            raise ValueError("confidence interval must bracket the mean")


def _sigmoid(z):
    return expit(z)


def remove_outliers(samples) -> tuple[list[float], float]:
    """Single-pass 2-SD trim against the original mean and SD.

    Returns the kept values (original order) and the discarded fraction.
    The SD is the plain standard deviation of the sample set and the cut
    is inclusive: a point exactly 2 SDs out is removed. Re-applying with
    the original statistics removes nothing further.
    """
    values = [float(v) for v in samples]
    n = len(values)
    if n < 3:
        raise InsufficientDataError(f"outlier removal needs >= 3 samples, got {n}")
    arr = np.asarray(values)
    mean = arr.mean()
    sd = arr.std()
    if sd == 0.0:
        return values, 0.0
    kept = [v for v in values if abs(v - mean) < 2.0 * sd]
    return kept, (n - len(kept)) / n


def _select(obs, phase, tracked=None):
    out = [o for o in obs if o.phase == phase]
    if tracked is not None:
        out = [o for o in out if o.tracked == tracked]
    return out


def fit_linear(obs, phase: str = LOOKING, tracked: bool = True) -> LinearErrorModel:
    """Ordinary least squares of angular error on gaze shift.

    Closed-form fit over the selected (phase, tracked) subset; reports a
    two-sided t-test p-value for the slope and R-squared.
    """
    subset = _select(obs, phase, tracked)
    x = np.array([o.delta_phi_deg for o in subset])
    y = np.array([o.error_deg for o in subset])
    n = len(x)
    if n < 2:
        raise InsufficientDataError(f"linear fit needs >= 2 samples, got {n}")
    if np.unique(x).size < 2:
        raise DegenerateDesignError("all gaze-shift values are equal")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    sxy = float(np.sum((x - xm) * (y - ym)))
    c2 = sxy / sxx
    c1 = ym - c2 * xm
    resid = y - (c1 + c2 * x)
    ssr = float(np.sum(resid**2))
    sst = float(np.sum((y - ym) ** 2))
    r_squared = 1.0 - ssr / sst if sst > 0 else 0.0
    if n > 2 and ssr > 0:
        se = math.sqrt(ssr / (n - 2) / sxx)
        t = c2 / se
        p = 2.0 * float(stats.t.sf(abs(t), n - 2))
    else:
        # perfect fit (or no residual dof): slope either exact or absent
        p = 0.0 if c2 != 0 else 1.0
    return LinearErrorModel(c1, c2, p_value=p, r_squared=r_squared, n=n)


def predict_error(m: LinearErrorModel, delta_phi_deg: float) -> float:
    """Expected angular error (degrees) at a given gaze shift."""
    if delta_phi_deg < 0:
        raise ValueError("gaze shift must be >= 0")
    return m.c1 + m.c2 * delta_phi_deg


def _log_likelihood(beta, x, y):
    z = beta[0] + beta[1] * x
    # log sigma(z) for y=1, log(1-sigma(z)) for y=0, stable form
    return float(np.sum(y * z - np.logaddexp(0.0, z)))


def fit_logistic(obs, phase: str = LOOKING) -> LogisticFit:
    """Maximum-likelihood logistic regression of tracking success on gaze shift.

    Newton/IRLS iterations with step halving, so the log-likelihood is
    non-decreasing. Stops when it changes by less than 1e-10 or after 100
    iterations. Raises ``SeparationError`` when the classes are perfectly
    separable (coefficients diverge).
    """
    subset = _select(obs, phase)
    x = np.array([o.delta_phi_deg for o in subset])
    y = np.array([1.0 if o.tracked else 0.0 for o in subset])
    if len(x) < 2 or y.min() == y.max():
        raise InsufficientDataError("logistic fit needs both tracked classes present")
    beta = np.zeros(2)
    ll = _log_likelihood(beta, x, y)
    design = np.column_stack([np.ones_like(x), x])
    converged = False
    it = 0
    for it in range(1, IRLS_MAX_ITER + 1):
        mu = _sigmoid(design @ beta)
        w = mu * (1.0 - mu)
        grad = design.T @ (y - mu)
        hess = design.T @ (w[:, None] * design)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            raise SeparationError("singular Hessian; classes perfectly separable") from None
        # halve the step until the likelihood does not decrease
        scale = 1.0
        new_beta = beta + step
        new_ll = _log_likelihood(new_beta, x, y)
        while new_ll < ll and scale > 1e-8:
            scale *= 0.5
            new_beta = beta + scale * step
            new_ll = _log_likelihood(new_beta, x, y)
        beta, delta_ll, ll = new_beta, new_ll - ll, new_ll
        if np.abs(beta).max() > SEPARATION_COEF_LIMIT:
            raise SeparationError(
                f"coefficients diverged (|beta| > {SEPARATION_COEF_LIMIT:g}); "
                "classes perfectly separable"
            )
        if abs(delta_ll) < IRLS_TOL:
            converged = True
            break
    if ll > -1e-8:
        # every sample fitted with probability ~1: the likelihood is
        # unbounded and the coefficients would diverge if iterated further
        raise SeparationError("perfect fit reached; classes perfectly separable")
    return LogisticFit(float(beta[0]), float(beta[1]), converged, it, ll)


def predict_tracked_prob(m, delta_phi_deg: float) -> float:
    """Probability of successful tracking at a given gaze shift."""
    if delta_phi_deg < 0:
        raise ValueError("gaze shift must be >= 0")
    return float(_sigmoid(m.beta0 + m.beta1 * delta_phi_deg))


def cross_validate_threshold(
    obs,
    k: int = 5,
    threshold_range: tuple[float, float] = (0.25, 0.75),
    step: float = 0.01,
    seed: int = 0,
    phase: str = LOOKING,
) -> tuple[float, float]:
    """K-fold cross-validated decision-point search.

    For each candidate threshold in the grid the mean held-out accuracy
    of "tracked iff P(shift) >= threshold" is evaluated; the best
    threshold wins, ties broken toward the larger value. Deterministic
    for a fixed seed.
    """
    subset = _select(obs, phase)
    n = len(subset)
    if n < k:
        raise InsufficientDataError(f"{k}-fold CV needs >= {k} samples, got {n}")
    lo, hi = threshold_range
    thresholds = np.round(np.arange(lo, hi + step / 2, step), 10)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    folds = np.array_split(order, k)
    x = np.array([o.delta_phi_deg for o in subset])
    y = np.array([1.0 if o.tracked else 0.0 for o in subset])
    fold_acc = np.zeros((k, thresholds.size))
    for i, held in enumerate(folds):
        train = np.setdiff1d(order, held)
        train_obs = [subset[j] for j in train]
        try:
            fit = fit_logistic(train_obs, phase=phase)
            p = _sigmoid(fit.beta0 + fit.beta1 * x[held])
        except InsufficientDataError:
            # single-class training fold: constant predictor at the
            # training positive fraction
            p = np.full(held.size, y[train].mean())
        labels = y[held]
        for j, tau in enumerate(thresholds):
            fold_acc[i, j] = np.mean((p >= tau) == labels)
    mean_acc = fold_acc.mean(axis=0)
    best = int(np.flatnonzero(mean_acc == mean_acc.max())[-1])
    return float(thresholds[best]), float(mean_acc[best])


def refit_accuracy(obs, decision_point: float, phase: str = LOOKING) -> float:
    """Accuracy of the all-data refit at a fixed decision point."""
    subset = _select(obs, phase)
    fit = fit_logistic(subset, phase=phase)
    x = np.array([o.delta_phi_deg for o in subset])
    y = np.array([1.0 if o.tracked else 0.0 for o in subset])
    p = _sigmoid(fit.beta0 + fit.beta1 * x)
    return float(np.mean((p >= decision_point) == y))


def fit_trackability(obs, k: int = 5, seed: int = 0, phase: str = LOOKING) -> TrackabilityModel:
    """Full trackability pipeline: MLE fit plus CV decision point."""
    decision_point, cv_acc = cross_validate_threshold(obs, k=k, seed=seed, phase=phase)
    fit = fit_logistic(obs, phase=phase)
    return TrackabilityModel(
        fit.beta0,
        fit.beta1,
        decision_point,
        cv_acc,
        refit_accuracy=refit_accuracy(obs, decision_point, phase=phase),
        converged=fit.converged,
    )


def trackable_limit(m: TrackabilityModel) -> float:
    """Largest gaze shift (degrees) still classified as trackable.

    Inverts the logistic model at the decision point. The trackable cone
    around the tip has a tip angle of twice this value.
    """
    if m.beta1 >= 0:
        raise InvalidModelError("no finite trackable limit for beta1 >= 0")
    logit = math.log(m.decision_point / (1.0 - m.decision_point))
    return (logit - m.beta0) / m.beta1


def summarize_pointing_error(obs, confidence: float = 0.95) -> SummaryStats:
    """Mean angular error with a t-distribution confidence interval.

    Uses the tracked samples of the pointing phase (gaze on the tip).
    """
    subset = _select(obs, POINTING, tracked=True)
    n = len(subset)
    if n < 2:
        raise InsufficientDataError(f"pointing summary needs >= 2 samples, got {n}")
    e = np.array([o.error_deg for o in subset])
    mean = float(e.mean())
    half_width = float(
        stats.t.ppf((1.0 + confidence) / 2.0, n - 1) * e.std(ddof=1) / math.sqrt(n)
    )
    return SummaryStats(mean, mean - half_width, mean + half_width, n)


# ---------------------------------------------------------------------------
# Observation I/O and the aggregate model report
# ---------------------------------------------------------------------------

CSV_HEADER = ["delta_phi_deg", "error_deg", "tracked", "phase"]

_TRUTHY = {"true", "1", "yes"}
_FALSY = {"false", "0", "no"}


def read_observations_csv(path) -> list[GazeObservation]:
    """Load observations from a CSV with header ``delta_phi_deg,error_deg,tracked,phase``.

    ``error_deg`` may be empty only on untracked rows.
    """
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"observations CSV missing columns: {missing}")
        for i, row in enumerate(reader, start=2):
            raw_tracked = row["tracked"].strip().lower()
            if raw_tracked in _TRUTHY:
                tracked = True
            elif raw_tracked in _FALSY:
                tracked = False
            else:
                raise ValueError(f"line {i}: unparseable tracked value {row['tracked']!r}")
            err = row["error_deg"].strip()
            out.append(
                GazeObservation(
                    delta_phi_deg=float(row["delta_phi_deg"]),
                    tracked=tracked,
                    error_deg=float(err) if err else None,
                    phase=row["phase"].strip().lower(),
                )
            )
    return out


def write_observations_csv(path, obs) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for o in obs:
            writer.writerow(
                [
                    repr(o.delta_phi_deg),
                    "" if o.error_deg is None else repr(o.error_deg),
                    "true" if o.tracked else "false",
                    o.phase,
                ]
            )


def _trim_errors(subset):
    """2-SD trim applied to the error values of one analysis subset.

    Same criterion as ``remove_outliers`` but keeps the observation
    objects rather than the bare values.
    """
    if len(subset) < 3:
        return list(subset), 0.0
    e = np.array([o.error_deg for o in subset])
    mean, sd = e.mean(), e.std()
    if sd == 0.0:
        return list(subset), 0.0
    kept = [o for o, v in zip(subset, e) if abs(v - mean) < 2.0 * sd]
    return kept, (len(subset) - len(kept)) / len(subset)


def build_model_report(obs, seed: int = 0, folds: int = 5) -> dict:
    """Fit every accuracy-study model and assemble a JSON-ready report.

    Outlier trimming happens independently inside each analysis subset;
    the logistic/CV stage uses all looking-phase samples (tracking flags
    carry no error value to trim on).
    """
    looking_tracked = _select(obs, LOOKING, tracked=True)
    pointing_tracked = _select(obs, POINTING, tracked=True)
    lt_kept, lt_frac = _trim_errors(looking_tracked)
    pt_kept, pt_frac = _trim_errors(pointing_tracked)

    linear = fit_linear(lt_kept)
    trackability = fit_trackability(obs, k=folds, seed=seed)
    pointing = summarize_pointing_error(pt_kept)
    limit = trackable_limit(trackability) if trackability.beta1 < 0 else None

    return {
        "n_observations": len(obs),
        "subsets": {
            "looking": len(_select(obs, LOOKING)),
            "looking_tracked": len(looking_tracked),
            "pointing": len(_select(obs, POINTING)),
            "pointing_tracked": len(pointing_tracked),
        },
        "outlier_discard_fraction": {"looking": lt_frac, "pointing": pt_frac},
        "linear_error_model": {
            "c1_deg": linear.c1,
            "c2_deg_per_deg": linear.c2,
            "slope_p_value": linear.p_value,
            "r_squared": linear.r_squared,
            "n": linear.n,
        },
        "trackability_model": {
            "beta0": trackability.beta0,
            "beta1": trackability.beta1,
            "decision_point": trackability.decision_point,
            "cv_accuracy": trackability.cv_accuracy,
            "refit_accuracy": trackability.refit_accuracy,
            "converged": trackability.converged,
            "trackable_limit_deg": limit,
            "cone_tip_angle_deg": None if limit is None else 2.0 * limit,
        },
        "pointing_error": {
            "mean_deg": pointing.mean,
            "ci_low_deg": pointing.ci_low,
            "ci_high_deg": pointing.ci_high,
            "n": pointing.n,
        },
        "settings": {"seed": seed, "folds": folds},
    }


# Coefficients reported by the tracker accuracy study; used as defaults for
# synthetic-user noise and as generator values in tests.
STUDY_LINEAR_MODEL = LinearErrorModel(c1=1.243, c2=0.032)
STUDY_TRACKABILITY_MODEL = TrackabilityModel(
    beta0=5.407, beta1=-0.177, decision_point=0.65, cv_accuracy=0.856
)
