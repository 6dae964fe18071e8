"""Reproduce the behavior-mode comparison: run a seeded experiment over
all four modes, bin outcomes by target speed, and print the performance
table with Bonferroni-corrected pairwise Welch t-tests.

Run: python demos/mode_comparison.py            (reduced, ~1 minute)
     python demos/mode_comparison.py --full     (15 participants, ~half a minute more)
"""

import sys

from gazecoop import ExperimentPlan, report, run_experiment

full = "--full" in sys.argv
plan = ExperimentPlan() if full else ExperimentPlan(participants=6)
n_trials = plan.participants * len(plan.modes) * plan.trials_per_mode
print(f"running {n_trials} trials of {plan.game.trial_duration:.0f} s each ...")

result = run_experiment(plan, progress=True)
rep = report(result.samples, plan.modes)

print(f"\ncollected {len(result.samples)} target samples, "
      f"{rep.discarded_fraction:.1%} outside the speed ranges")

print("\nperformance (completed / presented), mean over trials:")
header = "  ".join(f"{label:>18s}" for label in rep.range_labels)
print(f"{'mode':>12s}  {header}")
for mode in rep.modes:
    cells = []
    for label in rep.range_labels:
        cell = rep.cells[(mode, label)]
        cells.append(f"{cell.mean:.3f} (se {cell.se:.3f})")
    print(f"{mode:>12s}  " + "  ".join(f"{c:>18s}" for c in cells))

for label in rep.range_labels:
    print(f"\nBonferroni-corrected p-values, {label}:")
    print(f"{'':>12s}  " + "  ".join(f"{m:>11s}" for m in rep.modes))
    matrix = rep.corrected_p[label]
    for i, mode in enumerate(rep.modes):
        row = "  ".join(f"{matrix[i, j]:>11.4f}" for j in range(len(rep.modes)))
        print(f"{mode:>12s}  {row}")

print("\nreading: slave trails every mode; the assisted modes pull ahead of"
      "\nmanual as targets get faster; cooperative stays level with autonomous.")
