"""Fit the tracker accuracy models on a synthetic accuracy-study dataset:
outlier trimming, the linear error model, the logistic trackability model
with a cross-validated decision point, and the trackable cone.

Run: python demos/accuracy_models.py
"""

import numpy as np

from gazecoop import (
    GazeObservation,
    fit_linear,
    fit_trackability,
    predict_error,
    predict_tracked_prob,
    remove_outliers,
    summarize_pointing_error,
    trackable_limit,
)
from gazecoop.gaze_models import LOOKING, POINTING

rng = np.random.default_rng(2024)

# --- generate a study-sized dataset ---------------------------------------
# "looking" iterations: the participant fixates the next target while the
# robot still points at the previous one; tracking succeeds less often the
# further the gaze shifts away from the tip.
looking = []
shifts = rng.uniform(0.0, 60.0, 660)
p_tracked = 1.0 / (1.0 + np.exp(-(5.407 - 0.177 * shifts)))
for shift, p in zip(shifts, p_tracked):
    tracked = rng.random() < p
    err = abs(1.243 + 0.032 * shift + rng.normal(0.0, 0.6)) if tracked else None
    looking.append(GazeObservation(shift, tracked, err, LOOKING))

# "pointing" iterations: gaze and tip on the same target.
pointing = [
    GazeObservation(rng.uniform(0, 3), True, abs(rng.normal(1.99, 1.5)), POINTING)
    for _ in range(330)
]

# --- outlier trim within an analysis subset --------------------------------
errors = [o.error_deg for o in looking if o.tracked]
kept, discarded = remove_outliers(errors)
print(f"2-SD trim keeps {len(kept)}/{len(errors)} error values "
      f"(discarded {discarded:.1%})")

# --- linear error model -----------------------------------------------------
linear = fit_linear(looking)
print(f"\nlinear error model: eps = {linear.c1:.3f} + {linear.c2:.4f} * shift")
print(f"  slope p-value {linear.p_value:.2e}, R^2 {linear.r_squared:.3f}, n {linear.n}")

# --- trackability model and decision point ---------------------------------
trackability = fit_trackability(looking, k=5, seed=0)
print(f"\ntrackability: beta0 {trackability.beta0:.3f}, beta1 {trackability.beta1:.4f}")
print(f"  decision point {trackability.decision_point:.2f} "
      f"(cv accuracy {trackability.cv_accuracy:.1%}, refit {trackability.refit_accuracy:.1%})")

limit = trackable_limit(trackability)
print(f"  trackable up to {limit:.1f} deg -> cone tip angle {2 * limit:.1f} deg")
print(f"  P(tracked) at 0 deg:  {predict_tracked_prob(trackability, 0.0):.4f}")
print(f"  P(tracked) at limit:  {predict_tracked_prob(trackability, limit):.4f}")
print(f"  expected error there: {predict_error(linear, limit):.3f} deg")

# --- pointing-phase accuracy -------------------------------------------------
summary = summarize_pointing_error(pointing)
print(f"\npointing error: mean {summary.mean:.2f} deg, "
      f"95% CI [{summary.ci_low:.2f}, {summary.ci_high:.2f}], n {summary.n}")
