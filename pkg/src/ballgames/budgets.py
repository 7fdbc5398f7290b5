"""Frozen query budgets per (algorithm, q, c).

Calibrated once (seed 20260809, the acceptance grids) as 1.2 times the
observed maximum of queries/n; later runs assert against these constants.
The odd/2-color solver under the greedy policy is normalized by
n*(1+log2 n) instead, covering the binary-insertion median worst case.
"""

from __future__ import annotations

import math

# (algorithm, q, c) -> max allowed queries per ball
K_BUDGET: dict[tuple[str, int, int], float] = {}

# mb_odd_two_colors under the greedy policy: queries per n*(1+log2 n)
K_BUDGET_GREEDY_MEDIAN: dict[tuple[str, int, int], float] = {}

CALIBRATION_SEED = 20260809


def budget_limit(algorithm: str, q: int, c: int, n: int, policy: str) -> float | None:
    """Query allowance for one run, or None when the key is uncalibrated."""
    key = (algorithm, q, c)
    if algorithm == "mb_odd_two_colors" and policy == "greedy":
        k = K_BUDGET_GREEDY_MEDIAN.get(key)
        return None if k is None else k * n * (1 + math.log2(n))
    k = K_BUDGET.get(key)
    return None if k is None else k * n
