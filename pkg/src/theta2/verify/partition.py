"""Partition parity from the reciprocal of a + a^4, l = 3.

a + a^4 = sum over odd n = 1 mod 3 of x^(n^2) = x * prod(1 - x^(24k)) mod 2, so
its support is 1 + 24 s for s generalized pentagonal, and the coefficient of
x^(24k - 1) in its reciprocal is p(k) mod 2.
"""

from __future__ import annotations

import time

import numpy as np

from ..theta import theta_power, theta_series
from .catalog import CheckReport


def generalized_pentagonals(limit: int) -> list[int]:
    """k(3k-1)/2 for k = 0, 1, -1, 2, -2, ... below ``limit``, sorted."""
    out = {0}
    k = 1
    while k * (3 * k - 1) // 2 < limit:
        out.add(k * (3 * k - 1) // 2)
        if k * (3 * k + 1) // 2 < limit:
            out.add(k * (3 * k + 1) // 2)
        k += 1
    return sorted(out)


def partition_parities(k_max: int) -> np.ndarray:
    """p(k) mod 2 for k <= k_max by Euler's recurrence (signs vanish mod 2)."""
    pents = generalized_pentagonals(k_max + 1)[1:]
    p = np.zeros(k_max + 1, dtype=np.uint8)
    p[0] = 1
    for k in range(1, k_max + 1):
        acc = 0
        for g in pents:
            if g > k:
                break
            acc ^= int(p[k - g])
        p[k] = acc
    return p


def partition_parity_check(k_max: int = 20000, support_limit: int = 10**4) -> CheckReport:
    t0 = time.perf_counter()
    bound = max(24 * k_max + 2, support_limit)
    f = theta_series(3, 1, bound) + theta_power(3, 1, 4, bound)
    failures = []

    support = f.window(f.valuation, support_limit).tolist()
    expected = [1 + 24 * s for s in generalized_pentagonals((support_limit - 1) // 24 + 1) if 1 + 24 * s < support_limit]
    if support != expected:
        extra = sorted(set(support) ^ set(expected))[:5]
        failures.append(f"support of a+a^4 below {support_limit} differs at {extra}")

    inv = f.inverse()
    parity = partition_parities(k_max)
    exps = 24 * np.arange(1, k_max + 1) - 1
    got = inv.bits()[exps - inv.valuation]
    bad = np.nonzero(got != parity[1:])[0]
    for i in bad[:5].tolist():
        k = i + 1
        failures.append(f"k={k}: coefficient of x^{24 * k - 1} is {int(got[i])}, p(k) mod 2 is {int(parity[k])}")

    ms = (time.perf_counter() - t0) * 1000
    detail = {"k_max": k_max, "odd_partitions": int(parity[1:].sum())}
    if failures:
        return CheckReport("R.partition", "empirical", "fail", "; ".join(failures), ms, detail)
    return CheckReport("R.partition", "empirical", "pass", None, ms, detail)
