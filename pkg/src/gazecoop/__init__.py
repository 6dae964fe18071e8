"""Gaze-driven attention estimation and behavior simulation for
handheld-robot cooperation."""

from .attention import (
    AUTONOMOUS,
    COOPERATIVE,
    MANUAL,
    MODES,
    SLAVE,
    AttentionEstimate,
    RobotCommand,
    RobotState,
    behavior_step,
    estimate_attention,
    move_tip,
    select_target_autonomous,
)
from .experiment import (
    SPEED_RANGES,
    ExperimentPlan,
    StatsReport,
    bin_by_speed,
    bonferroni,
    report,
    run_experiment,
    welch_t_test,
)
from .game import (
    GameConfig,
    GameState,
    Target,
    TargetSample,
    new_game,
    performance,
    required_lase_time,
    scenario_generate,
    spawn_step,
    tick,
)
from .gaze_models import (
    GazeObservation,
    LinearErrorModel,
    SummaryStats,
    TrackabilityModel,
    cross_validate_threshold,
    fit_linear,
    fit_logistic,
    fit_trackability,
    predict_error,
    predict_tracked_prob,
    remove_outliers,
    summarize_pointing_error,
    trackable_limit,
)
from .geometry import (
    GazeRay,
    Pose,
    ScreenPlane,
    angular_shift,
    calibrate_tracker_to_screen,
    compose,
    invert,
    local_gaze,
    ray_plane_intersection,
    world_gaze,
)
from .realtime import InputMessage, LiveSession, SessionConfig, Snapshot
from .session import run_trial, screen_plane_for
from .synthetic_user import UserParams, UserTickOutput, apply_gaze_noise, dropout_step, user_step

__version__ = "0.1.0"
