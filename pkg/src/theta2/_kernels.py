"""Word-level GF(2) polynomial kernels on little-endian uint64 bit vectors.

Bit ``t`` of a vector lives in word ``t >> 6`` at position ``t & 63``.

Three interchangeable multiplication backends are provided:

* ``numba``     -- Karatsuba with a nibble-table carryless base case, JIT compiled
* ``numpy``     -- the same split/recombine scheme in pure numpy (no JIT)
* ``reference`` -- quadratic shift-and-xor on Python integers (test oracle)

The active backend is read from ``THETA2_BACKEND`` at import time and can be
changed with :func:`set_backend`.  Every backend returns bit-identical results.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

try:  # pragma: no cover - exercised indirectly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

BACKENDS = ("numba", "numpy", "reference")

U64 = np.uint64

# Karatsuba leaf sizes in words.
NUMBA_LEAF = 24
NUMPY_LEAF = 48


def _initial_backend() -> str:
    name = os.environ.get("THETA2_BACKEND", "").strip().lower()
    if not name:
        return "numba" if HAVE_NUMBA else "numpy"
    if name not in BACKENDS:
        raise ValueError(f"THETA2_BACKEND must be one of {BACKENDS}, got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        warnings.warn("numba unavailable, falling back to numpy kernels")
        return "numpy"
    return name


_backend = _initial_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select the multiplication backend; returns the previous one."""
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, _backend = _backend, name
    return prev


# ---------------------------------------------------------------------------
# bit-vector helpers (pure numpy, shared by all backends)


def nwords(nbits: int) -> int:
    return (nbits + 63) >> 6


def zeros(nbits: int) -> np.ndarray:
    return np.zeros(nwords(nbits), dtype=U64)


def mask_tail(words: np.ndarray, nbits: int) -> np.ndarray:
    """Clear bits at positions >= nbits (in place) and return the array."""
    full, rem = divmod(nbits, 64)
    if rem:
        words[full] &= U64((1 << rem) - 1)
        words[full + 1 :] = 0
    else:
        words[full:] = 0
    return words


def truncate(words: np.ndarray, nbits: int) -> np.ndarray:
    """Copy of the low ``nbits`` bits, exactly ``nwords(nbits)`` words long."""
    n = nwords(nbits)
    out = np.zeros(n, dtype=U64)
    k = min(n, words.size)
    out[:k] = words[:k]
    return mask_tail(out, nbits)


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum()) if words.size else 0


def lowest_bit(words: np.ndarray) -> int:
    """Index of the lowest set bit, or -1 if all zero."""
    nz = np.flatnonzero(words)
    if nz.size == 0:
        return -1
    w = int(words[nz[0]])
    return int(nz[0]) * 64 + ((w & -w).bit_length() - 1)


def to_bits(words: np.ndarray, nbits: int) -> np.ndarray:
    """Unpack to a uint8 0/1 array of length nbits."""
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:nbits]


def from_bits(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    n = nwords(bits.size)
    pad = np.zeros(n * 64, dtype=np.uint8)
    pad[: bits.size] = bits
    return np.packbits(pad, bitorder="little").view("<u8").astype(U64)


def positions(words: np.ndarray, nbits: int | None = None) -> np.ndarray:
    """Indices of set bits, ascending, as int64."""
    if nbits is None:
        nbits = words.size * 64
    return np.flatnonzero(to_bits(words, nbits)).astype(np.int64)


def from_positions(pos, nbits: int) -> np.ndarray:
    """Bit vector with ones at ``pos`` (each index toggles, so duplicates cancel)."""
    bits = np.zeros(nbits, dtype=np.uint8)
    pos = np.asarray(pos, dtype=np.int64)
    pos = pos[(pos >= 0) & (pos < nbits)]
    if pos.size:
        np.bitwise_xor.at(bits, pos, 1)
    return from_bits(bits)


def shift_down(words: np.ndarray, s: int, nbits: int) -> np.ndarray:
    """Bits [s, s+nbits) moved to [0, nbits)."""
    q, r = divmod(s, 64)
    src = words[q:]
    n = nwords(nbits)
    out = np.zeros(n, dtype=U64)
    if r == 0:
        k = min(n, src.size)
        out[:k] = src[:k]
    else:
        k = min(n, src.size)
        out[:k] = src[:k] >> U64(r)
        k2 = min(n, src.size - 1)
        if k2 > 0:
            out[:k2] |= src[1 : k2 + 1] << U64(64 - r)
    return mask_tail(out, nbits)


def shift_up(words: np.ndarray, s: int, nbits: int) -> np.ndarray:
    """Bits [0, nbits - s) moved to [s, nbits); low s bits cleared."""
    q, r = divmod(s, 64)
    n = nwords(nbits)
    out = np.zeros(n, dtype=U64)
    if q >= n:
        return out
    k = min(n - q, words.size)
    if r == 0:
        out[q : q + k] = words[:k]
    else:
        out[q : q + k] = words[:k] << U64(r)
        k2 = min(n - q - 1, words.size)
        if k2 > 0:
            out[q + 1 : q + 1 + k2] |= words[:k2] >> U64(64 - r)
    return mask_tail(out, nbits)


_SPREAD_MASKS = (
    (16, U64(0x0000FFFF0000FFFF)),
    (8, U64(0x00FF00FF00FF00FF)),
    (4, U64(0x0F0F0F0F0F0F0F0F)),
    (2, U64(0x3333333333333333)),
    (1, U64(0x5555555555555555)),
)


def _spread32(x: np.ndarray) -> np.ndarray:
    for s, m in _SPREAD_MASKS:
        x = (x | (x << U64(s))) & m
    return x


def spread(words: np.ndarray) -> np.ndarray:
    """Frobenius map on coefficients: bit t goes to bit 2t."""
    out = np.empty(2 * words.size, dtype=U64)
    out[0::2] = _spread32(words & U64(0xFFFFFFFF))
    out[1::2] = _spread32(words >> U64(32))
    return out


def stretch(words: np.ndarray, nbits: int, q: int) -> np.ndarray:
    """Bit t goes to bit q*t, for any positive q (q a power of two uses spread)."""
    if q == 1:
        return truncate(words, nbits)
    if q & (q - 1) == 0 and q <= 8:
        out = words
        k = q
        while k > 1:
            out = spread(out)
            k >>= 1
        return truncate(out, nbits * q)
    pos = positions(words, nbits)
    return from_positions(pos * q, nbits * q)


def residue_mask(nbits: int, offset: int, q: int, j: int) -> np.ndarray:
    """Mask selecting bit positions t with offset + t == j (mod q)."""
    c = (j - offset) % q
    n = nwords(nbits)
    if q <= 64:
        pattern = 0
        for t in range(c, 64, q):
            pattern |= 1 << t
        out = np.full(n, U64(pattern), dtype=U64)
    else:
        w = np.arange(n, dtype=np.int64)
        bit = (c - 64 * w) % q
        out = np.zeros(n, dtype=U64)
        hit = bit < 64
        out[hit] = np.left_shift(U64(1), bit[hit].astype(U64))
    return mask_tail(out, nbits)


# ---------------------------------------------------------------------------
# reference backend: quadratic, Python integers


def words_to_int(words: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(words, dtype="<u8").tobytes(), "little")


def int_to_words(value: int, nbits: int) -> np.ndarray:
    n = nwords(nbits)
    value &= (1 << nbits) - 1 if nbits else 0
    raw = value.to_bytes(8 * n, "little")
    return np.frombuffer(raw, dtype="<u8").astype(U64)


def reference_mul(a: np.ndarray, b: np.ndarray, nbits: int) -> np.ndarray:
    """Schoolbook carryless product, one shifted XOR per set bit of the sparser operand."""
    x, y = words_to_int(a), words_to_int(b)
    if x.bit_count() > y.bit_count():
        x, y = y, x
    acc = 0
    t = 0
    while x:
        if x & 1:
            acc ^= y << t
        x >>= 1
        t += 1
    return int_to_words(acc, nbits)


# ---------------------------------------------------------------------------
# numpy backend


def _np_base(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Schoolbook block product, vectorized over all word pairs."""
    n, k = a.size, b.size
    A = a[:, None]
    B = b[None, :]
    lo = np.zeros((n, k), dtype=U64)
    hi = np.zeros((n, k), dtype=U64)
    for i in range(64):
        m = U64(0) - ((B >> U64(i)) & U64(1))
        lo ^= (A << U64(i)) & m
        if i:
            hi ^= (A >> U64(64 - i)) & m
    out = np.zeros(n + k, dtype=U64)
    idx = np.add.outer(np.arange(n), np.arange(k)).ravel()
    np.bitwise_xor.at(out, idx, lo.ravel())
    np.bitwise_xor.at(out, idx + 1, hi.ravel())
    return out


def _np_kara(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.size
    if n <= NUMPY_LEAF:
        return _np_base(a, b)
    h = (n + 1) // 2
    a0, a1, b0, b1 = a[:h], a[h:], b[:h], b[h:]
    z0 = _np_kara(a0, b0)
    z2 = _np_kara(a1, b1)
    sa = a0.copy()
    sa[: n - h] ^= a1
    sb = b0.copy()
    sb[: n - h] ^= b1
    z1 = _np_kara(sa, sb)
    z1 ^= z0
    z1[: z2.size] ^= z2
    out = np.zeros(2 * n, dtype=U64)
    out[: 2 * h] = z0
    out[2 * h :] = z2
    out[h : 3 * h] ^= z1
    return out


def _np_sparse(pos: np.ndarray, g: np.ndarray, nout: int) -> np.ndarray:
    out = np.zeros(nout, dtype=U64)
    pos = np.asarray(pos, dtype=np.int64)
    shifts = pos & 63
    for s in np.unique(shifts):
        s = int(s)
        lo = g << U64(s)
        hi = g >> U64(64 - s) if s else None
        for p in pos[shifts == s]:
            w = int(p) >> 6
            if w >= nout:
                continue
            k = min(g.size, nout - w)
            out[w : w + k] ^= lo[:k]
            if hi is not None:
                k2 = min(g.size, nout - w - 1)
                if k2 > 0:
                    out[w + 1 : w + 1 + k2] ^= hi[:k2]
    return out


# ---------------------------------------------------------------------------
# numba backend

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _nb_base(a, b, out):
        # out ^= a * b for equal-length blocks, nibble-table carryless products
        n = a.size
        k = b.size
        tlo = np.empty(16, np.uint64)
        thi = np.empty(16, np.uint64)
        m4 = np.uint64(15)
        for i in range(n):
            x = a[i]
            if x == 0:
                continue
            tlo[0] = 0
            thi[0] = 0
            for v in range(1, 16):
                lo = np.uint64(0)
                hi = np.uint64(0)
                for t in range(4):
                    if (v >> t) & 1:
                        lo ^= x << np.uint64(t)
                        if t:
                            hi ^= x >> np.uint64(64 - t)
                tlo[v] = lo
                thi[v] = hi
            for j in range(k):
                y = b[j]
                if y == 0:
                    continue
                lo = tlo[y & m4]
                hi = thi[y & m4]
                for nib in range(1, 16):
                    s = np.uint64(4 * nib)
                    v = (y >> s) & m4
                    if v:
                        lo ^= tlo[v] << s
                        hi ^= (tlo[v] >> (np.uint64(64) - s)) ^ (thi[v] << s)
                out[i + j] ^= lo
                out[i + j + 1] ^= hi

    @numba.njit(cache=True)
    def _nb_kara(a, b):
        n = a.size
        out = np.zeros(2 * n, np.uint64)
        if n <= NUMBA_LEAF:
            _nb_base(a, b, out)
            return out
        h = (n + 1) // 2
        z0 = _nb_kara(a[:h], b[:h])
        z2 = _nb_kara(a[h:], b[h:])
        sa = a[:h].copy()
        sb = b[:h].copy()
        for i in range(n - h):
            sa[i] ^= a[h + i]
            sb[i] ^= b[h + i]
        z1 = _nb_kara(sa, sb)
        for i in range(2 * h):
            out[i] = z0[i]
        for i in range(z2.size):
            out[2 * h + i] = z2[i]
            z1[i] ^= z2[i]
        for i in range(2 * h):
            t = h + i
            if t < 2 * n:
                out[t] ^= z1[i] ^ z0[i]
        return out

    @numba.njit(cache=True)
    def _nb_sparse(pos, g, nout):
        out = np.zeros(nout, np.uint64)
        ng = g.size
        for idx in range(pos.size):
            p = pos[idx]
            w = p >> 6
            s = np.uint64(p & 63)
            if w >= nout:
                continue
            k = min(ng, nout - w)
            if s == 0:
                for i in range(k):
                    out[w + i] ^= g[i]
            else:
                r = np.uint64(64) - s
                for i in range(k):
                    gi = g[i]
                    out[w + i] ^= gi << s
                    if w + i + 1 < nout:
                        out[w + i + 1] ^= gi >> r
        return out


# ---------------------------------------------------------------------------
# dispatch


def _kara(a: np.ndarray, b: np.ndarray, backend: str) -> np.ndarray:
    """Full product of equal-length word vectors."""
    if backend == "numba":
        return _nb_kara(a, b)
    return _np_kara(a, b)


def _dense(a: np.ndarray, b: np.ndarray, nbits: int, backend: str) -> np.ndarray:
    """Product truncated to nbits; unbalanced operands are cut into balanced blocks."""
    if a.size < b.size:
        a, b = b, a
    nout = nwords(nbits)
    out = np.zeros(max(nout, a.size + b.size), dtype=U64)
    k = b.size
    for start in range(0, a.size, k):
        if start >= nout:
            break
        blk = np.zeros(k, dtype=U64)
        chunk = a[start : start + k]
        blk[: chunk.size] = chunk
        prod = _kara(blk, b, backend)
        end = min(out.size, start + prod.size)
        out[start:end] ^= prod[: end - start]
    return mask_tail(out[:nout].copy(), nbits)


def _sparse(pos: np.ndarray, g: np.ndarray, nbits: int, backend: str) -> np.ndarray:
    nout = nwords(nbits)
    if backend == "numba":
        out = _nb_sparse(pos, g, nout)
    else:
        out = _np_sparse(pos, g, nout)
    return mask_tail(out, nbits)


def _strip(words: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(words)
    return words[: nz[-1] + 1] if nz.size else words[:0]


# Rough per-word costs used to choose between the sparse and Karatsuba paths.
_SPARSE_COST = 1.0
_KARA_COST = 40.0


def mul(a: np.ndarray, b: np.ndarray, nbits: int, backend: str | None = None) -> np.ndarray:
    """Low ``nbits`` bits of the carryless product of two bit vectors."""
    backend = backend or _backend
    if nbits <= 0:
        return np.zeros(0, dtype=U64)
    n = nwords(nbits)
    a = _strip(truncate(a, nbits))
    b = _strip(truncate(b, nbits))
    if a.size == 0 or b.size == 0:
        return np.zeros(n, dtype=U64)
    if backend == "reference":
        return reference_mul(a, b, nbits)
    pa, pb = popcount(a), popcount(b)
    if pa > pb or (pa == pb and a.size > b.size):
        a, b, pa, pb = b, a, pb, pa
    # a is the sparser operand
    sparse_cost = _SPARSE_COST * pa * b.size
    k = min(a.size, b.size)
    blocks = -(-max(a.size, b.size) // k)
    dense_cost = _KARA_COST * blocks * k ** 1.585
    if sparse_cost <= dense_cost:
        pos = positions(a)
        return _sparse(pos, b, nbits, backend)
    return _dense(a, b, nbits, backend)


def warmup() -> None:
    """Trigger JIT compilation of the numba kernels."""
    if HAVE_NUMBA:
        x = np.arange(1, 60, dtype=U64)
        _nb_kara(x, x)
        _nb_sparse(np.array([1, 70], dtype=np.int64), x, 64)
