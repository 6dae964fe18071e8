"""Seeded multi-trial mode-comparison experiments and their statistics.

Outcomes are binned into three target-speed ranges; per-trial completion
fractions are the unit of analysis, compared pairwise across behavior
modes with Welch t-tests under Bonferroni correction.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .attention import MODES, RobotState
from .errors import ConfigError, InsufficientDataError
from .game import GameConfig, TargetSample
from .session import run_trial
from .synthetic_user import UserParams


@dataclass(frozen=True)
class SpeedRange:
    label: str
    low: float
    high: float
    upper_inclusive: bool = False

    def contains(self, speed: float) -> bool:
        if self.upper_inclusive:
            return self.low <= speed <= self.high
        return self.low <= speed < self.high


SPEED_RANGES = (
    SpeedRange("R1", 70.0, 200.0),
    SpeedRange("R2", 200.0, 330.0),
    SpeedRange("R3", 330.0, 490.0, upper_inclusive=True),
)


@dataclass(frozen=True)
class ExperimentPlan:
    """Deterministic experiment description; expands to per-trial seeds."""

    modes: tuple[str, ...] = MODES
    participants: int = 15
    trials_per_mode: int = 3
    base_seed: int = 0
    game: GameConfig = field(default_factory=GameConfig)
    user: UserParams = field(default_factory=UserParams)
    robot_tip_speed_limit: float = 1500.0
    robot_workspace_radius: float = 200.0

    def __post_init__(self):
        if self.participants < 1 or self.trials_per_mode < 1:
            raise ConfigError("participants and trials_per_mode must be >= 1")
        unknown = [m for m in self.modes if m not in MODES]
        if unknown:
            raise ConfigError(f"unknown behavior modes: {unknown}")

    def to_dict(self) -> dict:
        return {
            "modes": list(self.modes),
            "participants": self.participants,
            "trials_per_mode": self.trials_per_mode,
            "base_seed": self.base_seed,
            "game": self.game.to_dict(),
            "user": self.user.to_dict(),
            "robot": {
                "tip_speed_limit": self.robot_tip_speed_limit,
                "workspace_radius": self.robot_workspace_radius,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPlan":
        data = dict(data)
        robot = data.pop("robot", {})
        kwargs = {
            "modes": tuple(data.get("modes", MODES)),
            "participants": data.get("participants", 15),
            "trials_per_mode": data.get("trials_per_mode", 3),
            "base_seed": data.get("base_seed", 0),
        }
        if "game" in data:
            kwargs["game"] = GameConfig.from_dict(data["game"])
        if "user" in data:
            kwargs["user"] = UserParams.from_dict(data["user"])
        if "tip_speed_limit" in robot:
            kwargs["robot_tip_speed_limit"] = robot["tip_speed_limit"]
        if "workspace_radius" in robot:
            kwargs["robot_workspace_radius"] = robot["workspace_radius"]
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "ExperimentPlan":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class TrialSpec:
    participant: int
    mode: str
    trial_index: int
    seed: int
    trial_id: str


def expand_trials(plan: ExperimentPlan) -> list[TrialSpec]:
    """Enumerate every (participant, mode, repeat) with its derived seed."""
    specs = []
    idx = 0
    for participant in range(plan.participants):
        for mode in plan.modes:
            for trial in range(plan.trials_per_mode):
                seed = plan.base_seed * 1_000_003 + idx
                specs.append(
                    TrialSpec(
                        participant,
                        mode,
                        trial,
                        seed,
                        f"p{participant:02d}-{mode}-t{trial}",
                    )
                )
                idx += 1
    return specs


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    trials: list[TrialSpec]
    samples: list[TargetSample]


def run_experiment(plan: ExperimentPlan, log_dir=None, progress=False) -> ExperimentResult:
    """Run every planned trial; deterministic and reproducible per seed."""
    specs = expand_trials(plan)
    samples: list[TargetSample] = []
    for i, spec in enumerate(specs):
        log_fh = None
        if log_dir is not None:
            log_fh = open(Path(log_dir) / f"{spec.trial_id}.jsonl", "w")
        try:
            result = run_trial(
                spec.mode,
                plan.game,
                plan.user,
                spec.seed,
                trial_id=spec.trial_id,
                robot=RobotState(
                    tip_speed_limit=plan.robot_tip_speed_limit,
                    workspace_radius=plan.robot_workspace_radius,
                ),
                log_fh=log_fh,
            )
        finally:
            if log_fh is not None:
                log_fh.close()
        samples.extend(result.samples)
        if progress and (i + 1) % 10 == 0:
            print(f"  {i + 1}/{len(specs)} trials done")
    return ExperimentResult(plan, specs, samples)


def bin_by_speed(samples) -> tuple[dict[str, list[TargetSample]], float]:
    """Partition samples into the three speed ranges.

    Returns the per-range groups and the discarded (out-of-range)
    fraction; every sample lands in exactly one bin or the discard pile.
    """
    groups: dict[str, list[TargetSample]] = {r.label: [] for r in SPEED_RANGES}
    samples = list(samples)
    discarded = 0
    for s in samples:
        for r in SPEED_RANGES:
            if r.contains(s.speed):
                groups[r.label].append(s)
                break
        else:
            discarded += 1
    fraction = discarded / len(samples) if samples else 0.0
    return groups, fraction


def welch_t_test(group_a, group_b) -> float:
    """Two-sided Welch t-test p-value with Satterthwaite degrees of freedom.

    Degenerate zero-variance pairs short-circuit: equal means give p = 1,
    distinct means give p = 0 with a warning.
    """
    a = np.asarray(list(group_a), dtype=float)
    b = np.asarray(list(group_b), dtype=float)
    if a.size < 2 or b.size < 2:
        raise InsufficientDataError("welch_t_test needs n >= 2 per group")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if va == 0.0 and vb == 0.0:
        if a.mean() == b.mean():
            return 1.0
        warnings.warn("both groups constant with distinct means; p := 0", stacklevel=2)
        return 0.0
    na, nb = a.size, b.size
    se2 = va / na + vb / nb
    t = (a.mean() - b.mean()) / np.sqrt(se2)
    df = se2**2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return float(2.0 * stats.t.sf(abs(t), df))


def bonferroni(p_matrix, m: int):
    """Clamp-corrected p-values: each entry becomes min(1, p * m)."""
    if m < 1:
        raise ValueError("number of comparisons must be >= 1")
    p = np.asarray(p_matrix, dtype=float)
    return np.minimum(1.0, p * m)


@dataclass(frozen=True)
class CellStats:
    mean: float
    n: int
    se: float


@dataclass
class StatsReport:
    modes: tuple[str, ...]
    range_labels: tuple[str, ...]
    cells: dict  # (mode, range_label) -> CellStats
    trial_performance: dict  # (mode, range_label) -> list of per-trial fractions
    raw_p: dict  # range_label -> modes x modes ndarray
    corrected_p: dict  # range_label -> modes x modes ndarray
    discarded_fraction: float
    comparisons: int


def _per_trial_performance(samples) -> dict[str, float]:
    by_trial: dict[str, list[TargetSample]] = {}
    for s in samples:
        by_trial.setdefault(s.trial_id, []).append(s)
    return {
        tid: sum(1 for s in group if s.completed) / len(group)
        for tid, group in by_trial.items()
    }


def report(samples, modes: tuple[str, ...] = MODES) -> StatsReport:
    """Mode x speed-range performance table plus corrected p-value matrices.

    The unit of analysis is the trial: each trial contributes one
    completion fraction per speed range it has samples in.
    """
    samples = list(samples)
    trials_per_mode: dict[str, set] = {m: set() for m in modes}
    for s in samples:
        if s.mode in trials_per_mode:
            trials_per_mode[s.mode].add(s.trial_id)
    for m in modes:
        if len(trials_per_mode[m]) < 2:
            raise InsufficientDataError(f"mode {m!r} has fewer than 2 trials")

    groups, discarded = bin_by_speed(samples)
    labels = tuple(r.label for r in SPEED_RANGES)
    m_comparisons = len(modes) * (len(modes) - 1) // 2

    cells = {}
    perf = {}
    raw_p = {}
    corrected_p = {}
    for label in labels:
        in_range = groups[label]
        for mode in modes:
            values = list(
                _per_trial_performance([s for s in in_range if s.mode == mode]).values()
            )
            perf[(mode, label)] = values
            if values:
                arr = np.asarray(values)
                se = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
                cells[(mode, label)] = CellStats(float(arr.mean()), arr.size, se)
            else:
                cells[(mode, label)] = CellStats(float("nan"), 0, float("nan"))
        p = np.ones((len(modes), len(modes)))
        for i, ma in enumerate(modes):
            for j, mb in enumerate(modes):
                if j <= i:
                    continue
                va, vb = perf[(ma, label)], perf[(mb, label)]
                if len(va) < 2 or len(vb) < 2:
                    p[i, j] = p[j, i] = float("nan")
                else:
                    p[i, j] = p[j, i] = welch_t_test(va, vb)
        raw_p[label] = p
        corrected_p[label] = bonferroni(p, m_comparisons)
        np.fill_diagonal(corrected_p[label], 1.0)

    return StatsReport(
        modes=tuple(modes),
        range_labels=labels,
        cells=cells,
        trial_performance=perf,
        raw_p=raw_p,
        corrected_p=corrected_p,
        discarded_fraction=discarded,
        comparisons=m_comparisons,
    )


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def write_samples_jsonl(path, samples) -> None:
    with open(path, "w") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_dict(), sort_keys=True) + "\n")


def write_report_csv(path, rep: StatsReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["mode"]
        for label in rep.range_labels:
            header += [f"{label}_mean", f"{label}_n", f"{label}_se"]
        writer.writerow(header)
        for mode in rep.modes:
            row = [mode]
            for label in rep.range_labels:
                cell = rep.cells[(mode, label)]
                row += [repr(cell.mean), cell.n, repr(cell.se)]
            writer.writerow(row)


def write_pvalue_csvs(out_dir, rep: StatsReport) -> list[Path]:
    paths = []
    for label in rep.range_labels:
        path = Path(out_dir) / f"pvalues_{label}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mode", *rep.modes])
            matrix = rep.corrected_p[label]
            for i, mode in enumerate(rep.modes):
                writer.writerow([mode, *[repr(float(v)) for v in matrix[i]]])
        paths.append(path)
    return paths


def write_trials_csv(path, trials) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial_id", "participant", "mode", "trial_index", "seed"])
        for t in trials:
            writer.writerow([t.trial_id, t.participant, t.mode, t.trial_index, t.seed])


def export_results(out_dir, result: ExperimentResult, rep: StatsReport | None = None) -> StatsReport:
    """Write samples.jsonl, report.csv, pvalues_R{1,2,3}.csv and trials.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = rep if rep is not None else report(result.samples, result.plan.modes)
    write_samples_jsonl(out / "samples.jsonl", result.samples)
    write_report_csv(out / "report.csv", rep)
    write_pvalue_csvs(out, rep)
    write_trials_csv(out / "trials.csv", result.trials)
    return rep
