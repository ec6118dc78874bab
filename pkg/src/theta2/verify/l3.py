"""Empirical checks of the l = 3 results on B(a), a = [1].

For l = 3 every member n of B(a) is 2 mod 3 and:
  * n even: n/2 is a square;
  * n = 1 mod 4: an odd number of (s1, s2) squares with s1 + 4 s2 = n, and n
    is a prime times a square;
  * n = 3 mod 8: an odd number of (s1, s2) squares with s1 + 2 s2 = n, and n
    is a prime times a square.
For n = 3 mod 8, membership is the parity of #{r_i = 1 mod 3 : r1^2 + 2 r2^2 +
8 r3^2 = n}, and for n = 11 mod 24 the number of ordered triples of squares
summing to n is three times that count.
"""

from __future__ import annotations

import math
import time

import numpy as np

from ..theta import b_set, theta_series
from .catalog import CheckReport

USTAR_3 = ((0, 2), (1, 4), (3, 8))


def spf_sieve(n: int) -> np.ndarray:
    """Smallest prime factor of every k < n (0 and 1 map to themselves)."""
    spf = np.arange(n, dtype=np.int64)
    for p in range(2, math.isqrt(n - 1) + 1):
        if spf[p] == p:
            block = spf[p * p :: p]
            mask = block == np.arange(p * p, n, p)
            block[mask] = p
    return spf


def squarefree_part(n: int, spf: np.ndarray) -> int:
    out = 1
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            out *= p
    return out


def is_prime_times_square(n: int, spf: np.ndarray) -> bool:
    k = squarefree_part(n, spf)
    return k > 1 and int(spf[k]) == k


def square_pair_counts(limit: int, c: int) -> np.ndarray:
    """count[n] = #{(x, y) >= 0 : x^2 + c y^2 = n} for n < limit."""
    xs = np.arange(math.isqrt(limit - 1) + 1, dtype=np.int64) ** 2
    out = np.zeros(limit, dtype=np.int64)
    y = 0
    while c * y * y < limit:
        vals = xs + c * y * y
        vals = vals[vals < limit]
        out += np.bincount(vals, minlength=limit)
        y += 1
    return out


def one_mod_three_triples(limit: int) -> np.ndarray:
    """count[n] = #{r_i = 1 mod 3 : r1^2 + 2 r2^2 + 8 r3^2 = n}, n < limit."""

    def values(bound):
        k = math.isqrt(bound) // 3 + 2
        r = np.arange(-k, k + 1, dtype=np.int64) * 3 + 1
        return r[r * r < bound] ** 2

    r1 = values(limit)
    r2 = 2 * values(limit // 2 + 1)
    base = (r1[:, None] + r2[None, :]).ravel()
    base = base[base < limit]
    out = np.zeros(limit, dtype=np.int64)
    for t in 8 * values(limit // 8 + 1):
        vals = base + t
        out += np.bincount(vals[vals < limit], minlength=limit)
    return out


def square_triples(n: int) -> int:
    """Ordered (s1, s2, s3) of squares with s1 + s2 + s3 = n."""
    t = np.arange(math.isqrt(n) + 1, dtype=np.int64)
    rest = n - (t[:, None] ** 2 + t[None, :] ** 2)
    rest = rest[rest >= 0]
    root = np.sqrt(rest).astype(np.int64)
    for _ in range(2):
        root += (root + 1) ** 2 <= rest
        root -= root**2 > rest
    return int(np.count_nonzero(root * root == rest))


def _report(cid: str, method: str, t0: float, failures: list, detail: dict, limit: int = 5) -> CheckReport:
    ms = (time.perf_counter() - t0) * 1000
    if failures:
        return CheckReport(cid, method, "fail", "; ".join(failures[:limit]), ms, detail)
    return CheckReport(cid, method, "pass", None, ms, detail)


def l3_suite(n_max: int = 10**6, samples: int = 200, seed: int = 12345) -> list[CheckReport]:
    t0 = time.perf_counter()
    a = theta_series(3, 1, n_max + 2)
    members = np.array(b_set(a, n_max), dtype=np.int64)
    pos = members[members > 0]
    spf = spf_sieve(n_max)
    reports = []

    # even members
    t = time.perf_counter()
    even = pos[pos % 2 == 0]
    bad = [f"{n}: n/2 is not a square" for n in even.tolist() if math.isqrt(n // 2) ** 2 != n // 2]
    cap = math.isqrt(n_max // 2) + 1
    if len(even) > cap:
        bad.append(f"{len(even)} even members exceed the bound {cap}")
    reports.append(_report("L3.T2.4", "empirical", t, bad, {"even_members": int(len(even)), "bound": cap}))

    # 1 mod 4
    t = time.perf_counter()
    quad = square_pair_counts(n_max, 4)
    sel = pos[pos % 4 == 1]
    bad = [f"{n}: {int(quad[n])} pairs s1+4s2" for n in sel.tolist() if quad[n] % 2 == 0]
    bad += [f"{n}: not a prime times a square" for n in sel.tolist() if not is_prime_times_square(n, spf)]
    reports.append(_report("L3.T2.5", "empirical", t, bad, {"members": int(len(sel))}))

    # 3 mod 8
    t = time.perf_counter()
    half = square_pair_counts(n_max, 2)
    sel = pos[pos % 8 == 3]
    bad = [f"{n}: {int(half[n])} pairs s1+2s2" for n in sel.tolist() if half[n] % 2 == 0]
    bad += [f"{n}: not a prime times a square" for n in sel.tolist() if not is_prime_times_square(n, spf)]
    reports.append(_report("L3.T2.8", "empirical", t, bad, {"members": int(len(sel))}))

    # membership for 3 mod 8 against the triple count
    t = time.perf_counter()
    triples = one_mod_three_triples(n_max)
    in_b = np.zeros(n_max, dtype=bool)
    in_b[pos] = True
    cls = np.arange(3, n_max, 8)
    mismatch = cls[(triples[cls] % 2 == 1) != in_b[cls]]
    bad = [f"{n}: triple count {int(triples[n])}, member {bool(in_b[n])}" for n in mismatch.tolist()]
    reports.append(_report("L3.L2.6", "empirical", t, bad, {"checked": int(len(cls))}))

    # ordered square triples, sampled
    t = time.perf_counter()
    rng = np.random.default_rng(seed)
    pool = np.arange(11, n_max, 24)
    picks = np.sort(rng.choice(pool, size=min(samples, len(pool)), replace=False))
    picks = np.unique(np.concatenate([[11], picks]))
    bad = []
    for n in picks.tolist():
        s = square_triples(n)
        if s != 3 * int(triples[n]):
            bad.append(f"{n}: {s} square triples vs 3*{int(triples[n])}")
    reports.append(_report("L3.L2.7", "empirical", t, bad, {"sampled": int(len(picks)), "seed": seed}))

    # membership curve inside U*, reported only
    t = time.perf_counter()
    in_ustar = np.zeros(len(pos), dtype=bool)
    for j, q in USTAR_3:
        in_ustar |= pos % q == j
    hits = np.sort(pos[in_ustar])
    curve = []
    xs = [x for x in (4**k for k in range(5, 20)) if x < n_max] + [n_max]
    for x in xs:
        c = int(np.searchsorted(hits, x))
        curve.append({"x": x, "count": c, "ratio_to_x_over_log_x": round(c / (x / math.log(x)), 4)})
    reports.append(CheckReport("L3.T2.9", "descriptive", "pass", None, (time.perf_counter() - t) * 1000, {"curve": curve}))

    total = (time.perf_counter() - t0) * 1000
    for rep in reports:
        rep.detail.setdefault("suite_ms", round(total, 1))
    return reports
