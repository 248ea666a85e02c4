"""Hot inner loops.

Each kernel comes as a pair: ``foo_nb`` (explicit loops, numba-compiled) and
``foo_np`` (vectorised numpy).  ``foo`` is whichever one ``P2LAB_NO_NUMBA``
selects.  Integer kernels must agree exactly between the two variants and
float kernels to rounding; the test-suite checks this directly and
``benchmarks/bench_kernels.py`` times them.  Modular products assume moduli
below 3.03e9 unless a kernel says otherwise.
"""
import math

import numpy as np

from p2lab._accel import njit, pick

MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_BASES_ARR = np.array(MR_BASES, dtype=np.uint64)


# ---------------------------------------------------------------------------
# segmented sieve of Eratosthenes

@njit
def sieve_segment_nb(lo, hi, base_primes):
    mark = np.ones(hi - lo, dtype=np.bool_)
    for i in range(lo, min(hi, 2)):
        mark[i - lo] = False
    for j in range(base_primes.shape[0]):
        p = base_primes[j]
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        for m in range(start, hi, p):
            mark[m - lo] = False
    return mark


def sieve_segment_np(lo, hi, base_primes):
    mark = np.ones(hi - lo, dtype=np.bool_)
    if lo < 2:
        mark[: min(hi, 2) - lo] = False
    for p in base_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, -(-lo // p) * p)
        mark[start - lo:: p] = False
    return mark


# ---------------------------------------------------------------------------
# smallest prime factor table and multiplicative functions

@njit
def spf_table_nb(n):
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = i
            if i * i <= n:
                for m in range(i * i, n + 1, i):
                    if spf[m] == 0:
                        spf[m] = i
    return spf


def spf_table_np(n):
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    r = math.isqrt(n)
    for p in range(2, r + 1):
        if spf[p] == 0:
            seg = spf[p * p:: p]
            seg[seg == 0] = p
            spf[p] = p
    rest = np.nonzero(spf == 0)[0]
    rest = rest[rest >= 2]
    spf[rest] = rest
    return spf


@njit
def multiplicative_nb(n, spf, pidx, local):
    vals = np.zeros(n + 1, dtype=np.float64)
    if n >= 1:
        vals[1] = 1.0
    for i in range(2, n + 1):
        p = spf[i]
        m = i
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        vals[i] = vals[m] * local[pidx[p], k]
    return vals


def multiplicative_np(n, spf, pidx, local):
    vals = np.ones(n + 1, dtype=np.float64)
    vals[0] = 0.0
    rest = np.arange(n + 1, dtype=np.int64)
    active = np.nonzero(rest > 1)[0]
    while active.size:
        p = spf[rest[active]]
        k = np.zeros(active.size, dtype=np.int64)
        cur = rest[active]
        div = cur % p == 0
        while div.any():
            cur = np.where(div, cur // p, cur)
            k += div
            div = (cur % p == 0) & (cur > 1)
        rest[active] = cur
        vals[active] *= local[pidx[p], k]
        active = active[cur > 1]
    return vals


# ---------------------------------------------------------------------------
# Legendre symbols over an array of odd primes (Euler's criterion)

@njit
def _powmod_small(b, e, m):
    r = 1
    b %= m
    while e > 0:
        if e & 1:
            r = (r * b) % m
        b = (b * b) % m
        e >>= 1
    return r


@njit
def legendre_nb(a, primes):
    out = np.zeros(primes.shape[0], dtype=np.int64)
    for i in range(primes.shape[0]):
        p = primes[i]
        r = a % p
        if r == 0:
            continue
        if p == 2:
            out[i] = 1
            continue
        t = _powmod_small(r, (p - 1) // 2, p)
        out[i] = 1 if t == 1 else -1
    return out


def legendre_np(a, primes):
    p = np.asarray(primes, dtype=np.int64)
    base = np.mod(a, p)
    zero = base == 0
    e = (p - 1) // 2
    res = np.ones_like(p)
    while (e > 0).any():
        odd = (e & 1) == 1
        res = np.where(odd, (res * base) % p, res)
        base = (base * base) % p
        e >>= 1
    out = np.where(res == 1, 1, -1).astype(np.int64)
    out[p == 2] = 1
    out[zero] = 0
    return out


# ---------------------------------------------------------------------------
# 64-bit Miller-Rabin and Pollard-Brent (numba side)

@njit
def _mulmod_u64(a, b, m):
    # a, b < m < 2**63, all uint64
    if m < np.uint64(3037000499):
        return (a * b) % m
    if m < np.uint64(1125899906842624):  # 2**50: float quotient is off by at most 2
        q = np.uint64(float(a) * float(b) / float(m))
        r = np.int64(a * b - q * m)
        mi = np.int64(m)
        while r < 0:
            r += mi
        while r >= mi:
            r -= mi
        return np.uint64(r)
    res = np.uint64(0)
    while b > np.uint64(0):
        if b & np.uint64(1):
            res = res + a
            if res >= m:
                res -= m
        a = a + a
        if a >= m:
            a -= m
        b = b >> np.uint64(1)
    return res


@njit
def _powmod_u64(b, e, m):
    r = np.uint64(1)
    b = b % m
    while e > np.uint64(0):
        if e & np.uint64(1):
            r = _mulmod_u64(r, b, m)
        b = _mulmod_u64(b, b, m)
        e = e >> np.uint64(1)
    return r


@njit
def is_prime_nb(n):
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    nu = np.uint64(n)
    d = nu - np.uint64(1)
    s = 0
    while d & np.uint64(1) == np.uint64(0):
        d = d >> np.uint64(1)
        s += 1
    one = np.uint64(1)
    nm1 = nu - one
    for j in range(_MR_BASES_ARR.shape[0]):
        a = _MR_BASES_ARR[j]
        x = _powmod_u64(a, d, nu)
        if x == one or x == nm1:
            continue
        composite = True
        for _ in range(s - 1):
            x = _mulmod_u64(x, x, nu)
            if x == nm1:
                composite = False
                break
        if composite:
            return False
    return True


@njit
def _gcd_nb(a, b):
    while b:
        a, b = b, a % b
    return a


@njit
def pollard_brent_nb(n, seed):
    # returns a nontrivial factor of composite n (n odd, not a prime power)
    nu = np.uint64(n)
    c = np.uint64(seed % (n - 1) + 1)
    y = np.uint64(2)
    m = 128
    g = 1
    r = 1
    q = np.uint64(1)
    x = y
    ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (_mulmod_u64(y, y, nu) + c) % nu
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (_mulmod_u64(y, y, nu) + c) % nu
                diff = x - y if x > y else y - x
                q = _mulmod_u64(q, diff, nu)
            g = _gcd_nb(np.int64(q), n)
            k += m
        r *= 2
    if g == n:
        while True:
            ys = (_mulmod_u64(ys, ys, nu) + c) % nu
            diff = x - ys if x > ys else ys - x
            g = _gcd_nb(np.int64(diff), n)
            if g > 1:
                break
    return g


# ---------------------------------------------------------------------------
# polynomial-value sieve

def poly_values(a, b, c, n0, n1):
    """|a n^2 + b n + c| for n in [n0, n1) as int64 (caller guarantees no overflow)."""
    n = np.arange(n0, n1, dtype=np.int64)
    return np.abs((a * n + b) * n + c)


@njit
def apply_progressions_nb(n0, rem, omega, distinct, lpf, sqfree, mods, ress, ps, ks):
    size = rem.shape[0]
    for j in range(mods.shape[0]):
        m = mods[j]
        p = ps[j]
        k = ks[j]
        i = (ress[j] - n0) % m
        while i < size:
            rem[i] //= p
            omega[i] += 1
            if k == 1:
                distinct[i] += 1
                if lpf[i] == 0:
                    lpf[i] = p
            elif k == 2:
                sqfree[i] = False
            i += m


def apply_progressions_np(n0, rem, omega, distinct, lpf, sqfree, mods, ress, ps, ks):
    for m, r, p, k in zip(mods.tolist(), ress.tolist(), ps.tolist(), ks.tolist()):
        i = (r - n0) % m
        if i >= rem.shape[0]:
            continue
        sl = slice(i, None, m)
        rem[sl] //= p
        omega[sl] += 1
        if k == 1:
            distinct[sl] += 1
            seg = lpf[sl]
            seg[seg == 0] = p
        elif k == 2:
            sqfree[sl] = False


@njit
def classify_cofactors_nb(rem, omega, distinct, lpf, sqfree, bound):
    b2 = bound * bound
    for i in range(rem.shape[0]):
        c = rem[i]
        if c == 1:
            continue
        if c <= b2 or is_prime_nb(c):
            omega[i] += 1
            distinct[i] += 1
            if lpf[i] == 0:
                lpf[i] = c
            continue
        r = np.int64(math.sqrt(float(c)))
        while r * r > c:
            r -= 1
        while (r + 1) * (r + 1) <= c:
            r += 1
        omega[i] += 2
        if r * r == c:
            distinct[i] += 1
            sqfree[i] = False
            if lpf[i] == 0:
                lpf[i] = r
            continue
        distinct[i] += 2
        if lpf[i] == 0:
            f = pollard_brent_nb(c, 1)
            seed = 2
            while f == c:
                f = pollard_brent_nb(c, seed)
                seed += 1
            lpf[i] = min(f, c // f)


def classify_cofactors_np(rem, omega, distinct, lpf, sqfree, bound):
    from p2lab.ntcore import is_prime_u64, pollard_brent

    b2 = bound * bound
    small = (rem > 1) & (rem <= b2)
    omega[small] += 1
    distinct[small] += 1
    fill = small & (lpf == 0)
    lpf[fill] = rem[fill]
    for i in np.nonzero(rem > b2)[0].tolist():
        c = int(rem[i])
        if is_prime_u64(c):
            omega[i] += 1
            distinct[i] += 1
            if lpf[i] == 0:
                lpf[i] = c
            continue
        r = math.isqrt(c)
        omega[i] += 2
        if r * r == c:
            distinct[i] += 1
            sqfree[i] = False
            if lpf[i] == 0:
                lpf[i] = r
            continue
        distinct[i] += 2
        if lpf[i] == 0:
            f = pollard_brent(c)
            lpf[i] = min(f, c // f)


# ---------------------------------------------------------------------------
# batch factorisation of 63-bit values into a fixed-width table (0-padded)

FACTOR_WIDTH = 64


@njit
def _icbrt_nb(c):
    r = np.int64(round(float(c) ** (1.0 / 3.0)))
    while r * r * r > c:
        r -= 1
    while (r + 1) * (r + 1) * (r + 1) <= c:
        r += 1
    return r


@njit
def _isqrt_nb(c):
    r = np.int64(math.sqrt(float(c)))
    while r * r > c:
        r -= 1
    while (r + 1) * (r + 1) <= c:
        r += 1
    return r


@njit
def factor_batch_nb(vals, out):
    stack = np.zeros(FACTOR_WIDTH, dtype=np.int64)
    for i in range(vals.shape[0]):
        n = vals[i]
        cnt = 0
        for q in range(2, 1000):
            if q * q > n:
                break
            while n % q == 0:
                out[i, cnt] = q
                cnt += 1
                n //= q
        top = 0
        if n > 1:
            stack[0] = n
            top = 1
        while top > 0:
            top -= 1
            m = stack[top]
            if is_prime_nb(m):
                out[i, cnt] = m
                cnt += 1
                continue
            r = _isqrt_nb(m)
            if r * r == m:
                stack[top] = r
                stack[top + 1] = r
                top += 2
                continue
            r = _icbrt_nb(m)
            if r * r * r == m:
                stack[top] = r
                stack[top + 1] = r
                stack[top + 2] = r
                top += 3
                continue
            f = pollard_brent_nb(m, 1)
            seed = 2
            while f == m:
                f = pollard_brent_nb(m, seed)
                seed += 1
            stack[top] = f
            stack[top + 1] = m // f
            top += 2
        out[i, :cnt] = np.sort(out[i, :cnt])


def factor_batch_np(vals, out):
    from p2lab.ntcore import factorize

    for i, v in enumerate(vals.tolist()):
        fs = factorize(v)
        out[i, : len(fs)] = fs


# ---------------------------------------------------------------------------
# incomplete Kloosterman sums  sum_{r1<r<r2, (r,s)=1, r = lam (Lam)} e(h rbar / s)

@njit
def _inverse_nb(r, s):
    a = r % s
    b = s
    x0 = 1
    x1 = 0
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
    return x0 % s


@njit
def kloosterman_nb(hs, s, r1, r2, lam, Lam):
    re = np.zeros(hs.shape[0])
    im = np.zeros(hs.shape[0])
    two_pi = 2.0 * math.pi
    for r in range(r1 + 1, r2):
        if (r - lam) % Lam != 0:
            continue
        if _gcd_nb(abs(r), s) != 1:
            continue
        rbar = _inverse_nb(r, s) if s > 1 else 0
        for j in range(hs.shape[0]):
            t = (hs[j] % s) * rbar % s
            ang = two_pi * t / s
            re[j] += math.cos(ang)
            im[j] += math.sin(ang)
    return re, im


def kloosterman_np(hs, s, r1, r2, lam, Lam):
    hs = np.asarray(hs, dtype=np.int64)
    r = np.arange(r1 + 1, r2, dtype=np.int64)
    keep = ((r - lam) % Lam == 0) & (np.gcd(r, s) == 1)
    r = r[keep]
    if s == 1:
        rbar = np.zeros(r.size, dtype=np.int64)
    else:
        rbar = np.array([pow(int(v), -1, s) for v in r], dtype=np.int64)
    t = np.outer(hs % s, rbar) % s
    ang = 2.0 * np.pi * t / s
    return np.cos(ang).sum(axis=1), np.sin(ang).sum(axis=1)


# ---------------------------------------------------------------------------
# delay system for the sieve functions
#
# u(s) = s F(s), v(s) = s f(s);  u' = v(s-1)/(s-1) for s > 3,  v' = u(s-1)/(s-1) for s > 2.
# Each step integrates the cubic through four history nodes around the delayed
# interval.  v has a corner at s = 2 (index kv); stencils never straddle it.

@njit
def _cubic_step(w, j, h, kink):
    # integral over [s_{j-1}, s_j] of w(s)/s, w sampled at s_k = k h
    if kink == j - 1:
        a, c0, c1, c2, c3 = j - 1, 9.0, 19.0, -5.0, 1.0
    elif kink == j:
        a, c0, c1, c2, c3 = j - 3, 1.0, -5.0, 19.0, 9.0
    else:
        a, c0, c1, c2, c3 = j - 2, -1.0, 13.0, 13.0, -1.0
    return h * (c0 * w[a] / (a * h) + c1 * w[a + 1] / ((a + 1) * h)
                + c2 * w[a + 2] / ((a + 2) * h) + c3 * w[a + 3] / ((a + 3) * h)) / 24.0


@njit
def dde_loop_nb(u, v, h, delay, iu, iv, kv):
    n = u.shape[0]
    for i in range(1, n):
        j = i - delay  # history index for s_i - 1
        if i > iv:
            v[i] = v[i - 1] + _cubic_step(u, j, h, -10)
        if i > iu:
            u[i] = u[i - 1] + _cubic_step(v, j, h, kv)


def _cubic_block(w, js, h, kink):
    a = js - 2
    c = np.tile(np.array([-1.0, 13.0, 13.0, -1.0]), (js.size, 1))
    fwd = js - 1 == kink
    bwd = js == kink
    a[fwd] = js[fwd] - 1
    c[fwd] = [9.0, 19.0, -5.0, 1.0]
    a[bwd] = js[bwd] - 3
    c[bwd] = [1.0, -5.0, 19.0, 9.0]
    idx = a[:, None] + np.arange(4)[None, :]
    return h * np.sum(c * w[idx] / (idx * h), axis=1) / 24.0


def dde_loop_np(u, v, h, delay, iu, iv, kv):
    # a step reads history at least delay - 1 places back, so blocks of that
    # length can be integrated at once and accumulated with cumsum
    n = u.shape[0]
    block = delay - 1
    i0 = min(iu, iv) + 1
    while i0 < n:
        i1 = min(n, i0 + block)
        ii = np.arange(i0, i1)
        js = ii - delay
        dv = _cubic_block(u, js, h, -10)
        du = _cubic_block(v, js, h, kv)
        mv = ii > iv
        mu = ii > iu
        v[i0:i1] = np.where(mv, v[i0 - 1] + np.cumsum(np.where(mv, dv, 0.0)), v[i0:i1])
        u[i0:i1] = np.where(mu, u[i0 - 1] + np.cumsum(np.where(mu, du, 0.0)), u[i0:i1])
        i0 = i1


# ---------------------------------------------------------------------------

sieve_segment = pick(sieve_segment_nb, sieve_segment_np)
spf_table = pick(spf_table_nb, spf_table_np)
multiplicative = pick(multiplicative_nb, multiplicative_np)
legendre = pick(legendre_nb, legendre_np)
apply_progressions = pick(apply_progressions_nb, apply_progressions_np)
classify_cofactors = pick(classify_cofactors_nb, classify_cofactors_np)
kloosterman = pick(kloosterman_nb, kloosterman_np)
dde_loop = pick(dde_loop_nb, dde_loop_np)
factor_batch = pick(factor_batch_nb, factor_batch_np)
