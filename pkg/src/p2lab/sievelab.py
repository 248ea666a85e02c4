"""The value sequence A = {G(n) : n <= x}: factor data by sieving, sifting
functions, Richert weights and the remainder sums."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import struct

import numpy as np

from p2lab import kernels, localroots, ntcore
from p2lab.errors import DomainError, UnsupportedModulusError
from p2lab.polyform import QuadraticPoly, ShiftedPoly, as_quadratic, base_of

SEGMENT = 1 << 16
INT63 = (1 << 63) - 1


def _icbrt_ceil(n):
    r = round(n ** (1.0 / 3.0))
    while r**3 < n:
        r += 1
    while r > 0 and (r - 1) ** 3 >= n:
        r -= 1
    return r


def _max_abs_value(q, x):
    cands = [1, x]
    v = -q.b / (2 * q.a)
    for n in (math.floor(v), math.ceil(v)):
        if 1 <= n <= x:
            cands.append(n)
    return max(abs(q(n)) for n in cands)


@dataclass(frozen=True, eq=False)
class SieveSequence:
    """Factor data of |G(n)| for 1 <= n <= x (array index n - 1).

    ``lpf`` is 0 exactly when the value is 1.
    """
    x: int
    poly: object
    B: int
    omega: np.ndarray
    distinct: np.ndarray
    lpf: np.ndarray
    sqfree: np.ndarray

    @property
    def n(self):
        return np.arange(1, self.x + 1, dtype=np.int64)

    @property
    def values(self):
        q = as_quadratic(self.poly)
        return kernels.poly_values(q.a, q.b, q.c, 1, self.x + 1)

    def records(self):
        """(n, Omega, lpf, squarefree) per value."""
        return zip(range(1, self.x + 1), self.omega.tolist(), self.lpf.tolist(),
                   self.sqfree.tolist())

    def same_as(self, other):
        return (self.x == other.x and self.B == other.B
                and all(np.array_equal(getattr(self, k), getattr(other, k))
                        for k in ("omega", "distinct", "lpf", "sqfree")))


def default_bound(P, x):
    """ceil((D x^2)^(1/3)), D the coefficient-sum constant."""
    return _icbrt_ceil(as_quadratic(P).size_constant * x * x)


def root_progressions(P, B, max_value):
    """(modulus p^k, root, p, k) for primes p <= B and p^k <= max_value, sorted by (p, k)."""
    q = as_quadratic(P)
    g = base_of(P)
    mods, ress, ps, ks = [], [], [], []
    for p in ntcore.primes_up_to(max(B, 2)).primes.tolist():
        if p > B:
            break
        pk, k = p, 1
        while pk <= max_value:
            roots = localroots._roots_prime_power(q.a, q.b, q.c, g.a, g.delta, p, k)
            if not roots:
                break
            for r in roots:
                mods.append(pk)
                ress.append(r)
                ps.append(p)
                ks.append(k)
            pk *= p
            k += 1
    arr = lambda v: np.array(v, dtype=np.int64)
    return arr(mods), arr(ress), arr(ps), arr(ks)


def _sieve_segment(q, n0, n1, progs, B):
    rem = kernels.poly_values(q.a, q.b, q.c, n0, n1)
    size = n1 - n0
    omega = np.zeros(size, dtype=np.int64)
    distinct = np.zeros(size, dtype=np.int64)
    lpf = np.zeros(size, dtype=np.int64)
    sqfree = np.ones(size, dtype=np.bool_)
    kernels.apply_progressions(n0, rem, omega, distinct, lpf, sqfree, *progs)
    kernels.classify_cofactors(rem, omega, distinct, lpf, sqfree, B)
    return omega, distinct, lpf, sqfree


def build_sequence(P, x, B=None, workers=1, segment=SEGMENT):
    """Sieve |P(n)|, 1 <= n <= x, by root progressions of every p^k with p <= B.

    After removing all prime factors <= B the cofactor is 1, a prime, or (being
    at most B^3) a product of two primes > B, so Omega is exact.  The result
    does not depend on ``workers`` or ``segment``.
    """
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    q = as_quadratic(P)
    vmax = _max_abs_value(q, x)
    if vmax > INT63:
        raise DomainError(f"values up to {vmax} exceed 63 bits; lower x")
    need = _icbrt_ceil(vmax)
    if B is None:
        B = max(default_bound(P, x), 2)
    elif B < need:
        raise DomainError(f"sieve bound B = {B} is below the cube root {need} of max |G(n)|")
    progs = root_progressions(P, B, vmax)
    bounds = [(n0, min(n0 + segment, x + 1)) for n0 in range(1, x + 1, segment)]
    job = lambda b: _sieve_segment(q, b[0], b[1], progs, B)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, bounds))
    else:
        parts = [job(b) for b in bounds]
    cols = [np.concatenate([p[i] for p in parts]) for i in range(4)]
    return SieveSequence(x, P, B, *cols)


# ---------------------------------------------------------------------------
# divisibility classes and sifting functions

def _check_resolution(seq, d):
    big = [p for p in ntcore.prime_divisors(d) if p > seq.B]
    if big:
        raise UnsupportedModulusError(f"d = {d} has prime factors {big} above the sieve bound {seq.B}")


def _indices(seq, d):
    """Array indices (n - 1) of the n <= x with d | G(n)."""
    if d == 1:
        return np.arange(seq.x, dtype=np.int64)
    roots = localroots.roots_mod(seq.poly, d).roots
    parts = []
    for r in roots:
        first = r if r >= 1 else d
        if first <= seq.x:
            parts.append(np.arange(first - 1, seq.x, d, dtype=np.int64))
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.sort(np.concatenate(parts))


def count_Ad(seq, d):
    """|A_d| = #{n <= x : d | G(n)} from the root progressions."""
    if d < 1:
        raise DomainError(f"d must be positive, got {d}")
    _check_resolution(seq, d)
    if d == 1:
        return seq.x
    return sum((seq.x - r) // d - (-r) // d for r in localroots.roots_mod(seq.poly, d).roots)


def r_remainder(seq, d):
    """|A_d| - (rho(d)/d) x."""
    return count_Ad(seq, d) - localroots.rho(seq.poly, d) / d * seq.x


def _sifted(lpf, z):
    # lpf == 0 marks the value 1, which has no prime factor at all
    return (lpf == 0) | (lpf >= z)


def S_sift(seq, z):
    """#{n <= x : no prime factor of G(n) is below z}."""
    return int(np.count_nonzero(_sifted(seq.lpf, z)))


def S_sub(seq, d, z):
    """S(A_d, z) = #{n <= x : d | G(n), no prime factor of G(n) below z}."""
    idx = _indices(seq, d)
    return int(np.count_nonzero(_sifted(seq.lpf[idx], z)))


@dataclass(frozen=True)
class BuchstabResult:
    p: int
    z: int
    lhs: int
    rhs: int

    @property
    def equal(self):
        return self.lhs == self.rhs


def buchstab_check(seq, p, z):
    """sum_{z <= p1 < p} S(A_{p p1}, p1)  versus  S(A_p, z) - S(A_p, p)."""
    if not ntcore.is_prime_u64(p):
        raise DomainError(f"p = {p} is not prime")
    if z > p:
        raise DomainError(f"need z <= p, got z = {z}, p = {p}")
    lhs = 0
    if p > 2:
        for p1 in ntcore.primes_up_to(p - 1).primes.tolist():
            if p1 >= z:
                lhs += S_sub(seq, p * p1, p1)
    rhs = S_sub(seq, p, z) - S_sub(seq, p, p)
    return BuchstabResult(p, z, lhs, rhs)


# ---------------------------------------------------------------------------
# Richert weights

@dataclass(frozen=True)
class WeightParams:
    x: int
    lam: float
    D: int
    z: int
    lambda_rule: str = "2 + D/log x"

    def __post_init__(self):
        if not 2.0 <= self.lam < 3.0:
            raise DomainError(f"lambda = {self.lam} outside [2, 3)")
        if self.z > math.sqrt(self.x) + 1e-9:
            raise DomainError(f"z = {self.z} exceeds x^(1/2)")


def weight_params(P, x, z=None, lam=None):
    """Weight parameters for the sequence of P up to x.

    lambda = 2 + D/log x when that is below 3.  For larger D (the shifted
    polynomials have D in the hundreds) it is replaced by 2 + log D/log x,
    the least lambda with D x^2 <= x^lambda.  z defaults to ceil(x^(1/5)),
    which selects the same primes as x^(1/5) itself.
    """
    D = as_quadratic(P).size_constant
    rule = "given"
    if lam is None:
        lam, rule = 2.0 + D / math.log(x), "2 + D/log x"
        if lam >= 3.0:
            lam, rule = 2.0 + math.log(D) / math.log(x), "2 + log D/log x"
    if z is None:
        z = max(2, math.ceil(x ** 0.2 - 1e-12))
    return WeightParams(x, lam, D, z, rule)


def w_p(p, lpf, params):
    lx = math.log(params.x)
    if p == lpf:
        return 1.0 - math.log(p) / lx
    if p < math.sqrt(params.x):
        return math.log(lpf) / lx
    return 1.0 - math.log(p) / lx


def richert_weight(primes, params):
    """w(n) from the distinct primes of n (ascending).  The prime p = p_n is
    always given the first case, including when p_n >= x^(1/2)."""
    primes = sorted(set(int(p) for p in primes))
    if not primes:
        return 1.0
    lpf = primes[0]
    tot = math.fsum(w_p(p, lpf, params) for p in primes if p < params.x)
    return 1.0 - tot / (3.0 - params.lam)


def richert_weights_upto(N, params):
    """w(n) for every integer 0 <= n <= N (index n; entries 0, 1 are 1)."""
    spf = kernels.spf_table(N)
    lx = math.log(params.x)
    root = math.sqrt(params.x)
    lp = np.log(np.maximum(spf, 1).astype(np.float64))
    acc = np.zeros(N + 1)
    for p in ntcore.primes_up_to(min(max(params.x - 1, 2), N)).primes.tolist():
        if p >= params.x:
            break
        idx = np.arange(p, N + 1, p)
        own = spf[idx] == p
        if p < root:
            other = lp[idx] / lx
        else:
            other = np.full(idx.size, 1.0 - math.log(p) / lx)
        acc[idx] += np.where(own, 1.0 - math.log(p) / lx, other)
    return 1.0 - acc / (3.0 - params.lam)


def distinct_prime_counts(N):
    out = np.zeros(N + 1, dtype=np.int64)
    for p in ntcore.primes_up_to(max(N, 2)).primes.tolist():
        out[p::p] += 1
    return out


def _sifted_factor_table(seq, z):
    idx = np.nonzero(_sifted(seq.lpf, z))[0]
    vals = seq.values[idx]
    table = np.zeros((idx.size, kernels.FACTOR_WIDTH), dtype=np.int64)
    kernels.factor_batch(vals, table)
    return idx, table


@dataclass(frozen=True)
class WeightedSum:
    W_direct: float
    W_decomposed: float
    S: int
    buchstab_pairs: float
    small_prime_terms: float
    large_prime_terms: float
    params: WeightParams

    @property
    def rel_diff(self):
        return abs(self.W_direct - self.W_decomposed) / max(abs(self.W_direct), 1e-300)


def W_direct(seq, params):
    """sum over sifted values of w(a)."""
    idx, table = _sifted_factor_table(seq, params.z)
    if idx.size == 0:
        return 0.0
    lx = math.log(params.x)
    root = math.sqrt(params.x)
    rows = np.repeat(np.arange(idx.size), kernels.FACTOR_WIDTH)
    flat = table.ravel()
    # distinct primes: drop padding and repeats within a row (rows are sorted)
    prev = np.concatenate([[0], flat[:-1]])
    first_in_row = np.tile(np.arange(kernels.FACTOR_WIDTH) == 0, idx.size)
    keep = (flat > 0) & ((flat != prev) | first_in_row) & (flat < params.x)
    rows, ps = rows[keep], flat[keep].astype(np.float64)
    lpf = table[:, 0].astype(np.float64)[rows]
    lp = np.log(ps)
    wp = np.where(ps == lpf, 1.0 - lp / lx,
                  np.where(ps < root, np.log(lpf) / lx, 1.0 - lp / lx))
    per_row = np.zeros(idx.size)
    np.add.at(per_row, rows, wp)
    w = 1.0 - per_row / (3.0 - params.lam)
    return math.fsum(w.tolist())


def W_weighted(seq, params):
    """Direct weighted sum and its decomposition through S(A_d, .)-counts."""
    z = params.z
    lx = math.log(params.x)
    S = S_sift(seq, z)
    primes = ntcore.primes_up_to(max(params.x - 1, 2)).primes
    primes = primes[(primes >= z) & (primes < params.x)]
    small = primes[primes < math.sqrt(params.x)].tolist()
    large = primes[primes >= math.sqrt(params.x)].tolist()
    t1 = []
    for i, p in enumerate(small):
        for p1 in small[:i]:
            c = S_sub(seq, p * p1, p1)
            if c:
                t1.append(math.log(p / p1) / lx * c)
    t2 = []
    for p in small:
        lp = math.log(p) / lx
        t2.append((1.0 - 2.0 * lp) * S_sub(seq, p, p) + lp * S_sub(seq, p, z))
    t3 = []
    for p in large:
        c = S_sub(seq, p, z)
        if c:
            t3.append((1.0 - math.log(p) / lx) * c)
    T1, T2, T3 = math.fsum(t1), math.fsum(t2), math.fsum(t3)
    W2 = S + (T1 - T2 - T3) / (3.0 - params.lam)
    return WeightedSum(W_direct(seq, params), W2, S, T1, T2, T3, params)


# ---------------------------------------------------------------------------
# P2 counts

@dataclass(frozen=True)
class P2Count:
    x: int
    count: int
    count_distinct: int
    threshold: float
    ratio: float


def count_P2(seq, g=None):
    """#{n <= x : Omega(G(n)) <= 2}, against (Gamma_g/77) x/log x.

    ``count_distinct`` counts values with at most two distinct primes instead.
    """
    from p2lab.sievefn import theorem_threshold

    count = int(np.count_nonzero(seq.omega <= 2))
    cd = int(np.count_nonzero(seq.distinct <= 2))
    g = base_of(g if g is not None else seq.poly)
    if seq.x > 1:
        thr = theorem_threshold(g, seq.x)
        ratio = count / thr
    else:
        thr = ratio = float("nan")
    return P2Count(seq.x, count, cd, thr, ratio)


def nonsquarefree_sifted(seq, z):
    return int(np.count_nonzero(_sifted(seq.lpf, z) & ~seq.sqfree))


# ---------------------------------------------------------------------------
# remainder sums

def mobius_coeffs(N):
    return np.array([0] + [ntcore.mobius(n) for n in range(1, N)], dtype=np.int64)


def _check_coeffs(coeffs, N, m=None):
    c = np.asarray(coeffs)
    if c.size < N:
        raise DomainError(f"need coefficients b_n for n < {N}")
    if np.any(np.abs(c[1:N]) > 1):
        raise DomainError("coefficients must satisfy |b_n| <= 1")
    for n in range(1, N):
        if c[n] and not ntcore.is_squarefree(n):
            raise DomainError(f"b_{n} is nonzero but {n} is not squarefree")
    return c


def B_sum(seq, m, N, coeffs):
    """sum_{n < N, (n, m) = 1} b_n r(A; m n)."""
    c = _check_coeffs(coeffs, N)
    terms = [float(c[n]) * r_remainder(seq, m * n)
             for n in range(1, N) if c[n] and math.gcd(n, m) == 1]
    return math.fsum(terms)


@dataclass(frozen=True)
class Dispersion:
    M: int
    N: int
    moment: float
    bound: float

    @property
    def bound_ratio(self):
        return self.moment / self.bound


def dispersion_moment(seq, M, N, coeffs=None, eps=0.2):
    """sum_{M < m < 2M} B(x; m, N)^2, with (1 + N^{15/4} M^{-9/4} x) x^{1+eps} for scale."""
    if coeffs is None:
        coeffs = mobius_coeffs(N)
    c = _check_coeffs(coeffs, N)
    moment = math.fsum(B_sum(seq, m, N, c) ** 2 for m in range(M + 1, 2 * M))
    x = seq.x
    bound = (1.0 + N**3.75 * M**-2.25 * x) * x ** (1.0 + eps)
    return Dispersion(M, N, moment, bound)


# ---------------------------------------------------------------------------
# binary cache: a 96-byte header, then one record of four little-endian
# uint64 (n, Omega, lpf, flags) per n; flags bit 0 = squarefree,
# bits 8..15 = number of distinct primes.

MAGIC = b"P2LABSEQ"
VERSION = 1
_HEADER = struct.Struct("<8s11q")
RECORD = np.dtype([("n", "<u8"), ("omega", "<u8"), ("lpf", "<u8"), ("flags", "<u8")])


def save_sequence(seq, path):
    P = seq.poly
    g = base_of(P)
    q = as_quadratic(P)
    shifted = isinstance(P, ShiftedPoly)
    head = _HEADER.pack(MAGIC, VERSION, seq.x, seq.B, q.a, q.b, q.c, int(shifted),
                        g.a, g.b, g.c, P.t if shifted else 0)
    rec = np.empty(seq.x, dtype=RECORD)
    rec["n"] = np.arange(1, seq.x + 1)
    rec["omega"] = seq.omega
    rec["lpf"] = seq.lpf
    rec["flags"] = seq.sqfree.astype(np.uint64) | (seq.distinct.astype(np.uint64) << np.uint64(8))
    with open(path, "wb") as fh:
        fh.write(head.ljust(96, b"\0"))
        rec.tofile(fh)


def load_sequence(path):
    from p2lab.polyform import shift_to_G

    with open(path, "rb") as fh:
        head = fh.read(96)
        magic, version, x, B, A, Bc, C, shifted, ga, gb, gc, t = _HEADER.unpack(head[:_HEADER.size])
        if magic != MAGIC or version != VERSION:
            raise DomainError(f"{path} is not a p2lab sequence cache (version {VERSION})")
        rec = np.fromfile(fh, dtype=RECORD, count=x)
    if rec.size != x:
        raise DomainError(f"{path} is truncated: {rec.size} of {x} records")
    g = QuadraticPoly(ga, gb, gc)
    P = shift_to_G(g) if shifted else g
    if as_quadratic(P) != QuadraticPoly(A, Bc, C):
        raise DomainError(f"{path}: stored coefficients do not match the rebuilt polynomial")
    flags = rec["flags"]
    return SieveSequence(
        x, P, B,
        rec["omega"].astype(np.int64),
        ((flags >> np.uint64(8)) & np.uint64(0xFF)).astype(np.int64),
        rec["lpf"].astype(np.int64),
        (flags & np.uint64(1)).astype(bool),
    )
