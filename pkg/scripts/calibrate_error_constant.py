"""Calibrate the reconstruction error constant per smoothness order.

For each r, runs the reconstruction on the smooth trigonometric factor
family over several dimensions and phase-2 budgets, measures the
telescoping sup-error upper bound, and reports the smallest C with

    error <= C * M * d^(r+1) * n2^(-r)

across every run, doubled for headroom.  The resulting table is frozen
into rankone.recovery.CALIBRATED_ERROR_CONSTANT.

Usage: python3 scripts/calibrate_error_constant.py
"""

import numpy as np

from rankone import QueryOracle, RecoveryConfig, recover, sup_distance_bound
from rankone.pipeline import family_trig_smooth
from rankone import rng


def calibrate(r, dims=(2, 3, 4), multipliers=(6, 12, 24, 48, 96), seeds=(0, 1, 2)):
    worst = 0.0
    M = 0.2 * (2 * np.pi) ** r
    for d in dims:
        for seed in seeds:
            tensor = family_trig_smooth(d, r, M, rng.spawn(seed, 0xCA))
            z = np.full(d, 0.41)
            for mult in multipliers:
                n2 = mult * d
                oracle = QueryOracle(tensor)
                rec = recover(oracle, z, RecoveryConfig(r=r, budget_n2=n2))
                upper, _ = sup_distance_bound(
                    tensor, rec.line_interpolants, rec.center_value,
                    grid=4001, samples=1000, seed=seed)
                ratio = upper * n2 ** r / (M * d ** (r + 1))
                worst = max(worst, ratio)
    return worst


def main():
    print("r  worst_ratio      frozen_C (doubled)")
    for r in range(1, 6):
        w = calibrate(r)
        print(f"{r}  {w:.6e}  {2 * w:.6e}")


if __name__ == "__main__":
    main()
