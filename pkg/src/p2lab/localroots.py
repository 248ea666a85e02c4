"""Root counts rho(d) of quadratic congruences and the multiplicative functions f, g.

Good primes (p not dividing 2 a delta) have 1 + chi(p) roots, each lifting
uniquely to every prime power.  Exceptional primes are handled by exhaustive
lifting, so the results are exact for any admissible polynomial, shifted or not.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
import math

import numpy as np

from p2lab import kernels, ntcore
from p2lab.errors import DomainError, RangeError
from p2lab.polyform import as_quadratic, base_of

MAX_MODULUS = 1 << 62
BRUTE_LIMIT = 10**6


@dataclass(frozen=True)
class RootSet:
    modulus: int
    roots: tuple

    @property
    def rho(self):
        return len(self.roots)


def _coeffs(P):
    q = as_quadratic(P)
    g = base_of(P)
    return q.a, q.b, q.c, g.a, g.delta


def _chi_prime(delta, p):
    if p == 2 or delta % p == 0:
        return 0
    return ntcore.jacobi(delta, p)


def _is_exceptional(ga, delta, p):
    return (2 * ga * delta) % p == 0


@lru_cache(maxsize=200_000)
def _roots_prime_power(a, b, c, ga, delta, p, k):
    if not _is_exceptional(ga, delta, p):
        # the polynomial may be the shift G, whose discriminant is s^2 delta;
        # p does not divide s here, so its own discriminant is a unit mod p
        inv2a = pow(2 * a, -1, p)
        rr = ntcore.sqrt_mod(b * b - 4 * a * c, p)
        if rr is None:
            return ()
        base = sorted({(rr - b) * inv2a % p, (-rr - b) * inv2a % p})
        out = []
        for x in base:
            mod = p
            for _ in range(1, k):
                mod *= p
                fx = (a * x * x + b * x + c) % mod
                dfx = (2 * a * x + b) % mod
                x = (x - fx * pow(dfx, -1, mod)) % mod
            out.append(x)
        return tuple(sorted(out))
    # exceptional prime: exhaustive lifting level by level
    roots = [x for x in range(p) if (a * x * x + b * x + c) % p == 0]
    mod = p
    for _ in range(1, k):
        nxt = mod * p
        roots = [x + j * mod for x in roots for j in range(p)
                 if (a * (x + j * mod) ** 2 + b * (x + j * mod) + c) % nxt == 0]
        mod = nxt
        if not roots:
            break
    return tuple(sorted(roots))


def rho_p(P, p, r=1):
    """Number of roots of P modulo p**r."""
    a, b, c, ga, delta = _coeffs(P)
    if not _is_exceptional(ga, delta, p):
        return 1 + _chi_prime(delta, p)
    return len(_roots_prime_power(a, b, c, ga, delta, p, r))


def roots_mod(P, d):
    """All roots of P modulo d, via prime-power roots and the CRT."""
    if d <= 0:
        raise DomainError(f"modulus must be positive, got {d}")
    if d > MAX_MODULUS:
        raise RangeError(f"modulus {d} beyond machine range")
    if d == 1:
        return RootSet(1, (0,))
    a, b, c, ga, delta = _coeffs(P)
    parts = []
    for p, e in ntcore.factor_pairs(d):
        rs = _roots_prime_power(a, b, c, ga, delta, p, e)
        if not rs:
            return RootSet(d, ())
        parts.append((rs, p**e))
    mods = [m for _, m in parts]
    # CRT basis: x = sum r_i * e_i with e_i = 1 mod m_i, 0 mod the others
    basis = []
    for m in mods:
        rest = d // m
        basis.append(rest * pow(rest, -1, m) % d if m > 1 else 0)
    roots = sorted(sum(r * e for r, e in zip(combo, basis)) % d
                   for combo in product(*(rs for rs, _ in parts)))
    return RootSet(d, tuple(roots))


def rho(P, d):
    """rho(d) from the prime-power counts (multiplicative)."""
    if d == 1:
        return 1
    a, b, c, ga, delta = _coeffs(P)
    out = 1
    for p, e in ntcore.factor_pairs(d):
        if _is_exceptional(ga, delta, p):
            out *= len(_roots_prime_power(a, b, c, ga, delta, p, e))
        else:
            out *= 1 + _chi_prime(delta, p)
        if out == 0:
            return 0
    return out


def rho_bruteforce(P, d):
    """Direct count of residues 0..d-1 (test oracle)."""
    if d <= 0:
        raise DomainError(f"modulus must be positive, got {d}")
    if d > BRUTE_LIMIT:
        raise RangeError(f"brute-force oracle limited to d <= {BRUTE_LIMIT}")
    return int(np.count_nonzero(_brute_mask(P, d)))


def roots_bruteforce(P, d):
    if d > BRUTE_LIMIT:
        raise RangeError(f"brute-force oracle limited to d <= {BRUTE_LIMIT}")
    return tuple(np.nonzero(_brute_mask(P, d))[0].tolist())


def _brute_mask(P, d):
    q = as_quadratic(P)
    n = np.arange(d, dtype=np.int64)
    a, b, c = q.a % d, q.b % d, q.c % d
    return (((a * n) % d * n) % d + (b * n) % d + c) % d == 0


# ---------------------------------------------------------------------------
# f and g: prime-power tables from  sum rho(n) n^-s = L(s, chi) * sum f(n) n^-s,
# f = 1 * g.  At exceptional primes the local factor of f is (1 - chi(p) X).

def f_local(P, p, k):
    if k == 0:
        return 1
    g = base_of(P)
    chi = _chi_prime(g.delta, p)
    if not _is_exceptional(g.a, g.delta, p):
        return 1 if k == 1 else 0
    return -chi if k == 1 else 0


def g_local(P, p, k):
    if k == 0:
        return 1
    g = base_of(P)
    chi = _chi_prime(g.delta, p)
    if not _is_exceptional(g.a, g.delta, p):
        return -1 if k == 2 else 0
    # (1 - chi X)(1 - X) = 1 - (1 + chi) X + chi X^2
    return {1: -(1 + chi), 2: chi}.get(k, 0)


def f_val(P, n):
    return math.prod(f_local(P, p, e) for p, e in ntcore.factor_pairs(n))


def g_val(P, n):
    return math.prod(g_local(P, p, e) for p, e in ntcore.factor_pairs(n))


def chi_val(P, n):
    """The real character chi_delta of the base polynomial at n >= 1."""
    delta = base_of(P).delta
    if math.gcd(n, 2 * delta) != 1:
        return 0
    return ntcore.jacobi(delta, n)


# ---------------------------------------------------------------------------
# whole tables up to N via the smallest-prime-factor sieve

def _good_local_table(P, primes, kmax, good_row, fn):
    """Fill rows for good primes from ``good_row(chi)``; exceptional rows via ``fn``."""
    g = base_of(P)
    chis = kernels.legendre(g.delta, primes)
    chis[primes == 2] = 0
    tab = np.empty((primes.size, kmax + 1))
    for chi in (-1, 0, 1):
        tab[chis == chi] = good_row(chi, kmax)
    for p in g.exceptional_primes():
        i = int(np.searchsorted(primes, p))
        if i < primes.size and primes[i] == p:
            tab[i] = [fn(P, p, k) for k in range(kmax + 1)]
    return tab


def _spf_context(N):
    spf = kernels.spf_table(N)
    primes = ntcore.primes_up_to(max(N, 2)).primes
    pidx = np.zeros(N + 1, dtype=np.int64)
    pidx[primes[primes <= N]] = np.arange(int(np.count_nonzero(primes <= N)))
    primes = primes[primes <= N]
    kmax = max(1, int(math.log2(max(N, 2))) + 1)
    return spf, pidx, primes, kmax


def _table(P, N, good_row, fn):
    spf, pidx, primes, kmax = _spf_context(N)
    local = _good_local_table(P, primes, kmax, good_row, fn)
    return kernels.multiplicative(N, spf, pidx, local)


def rho_table(P, N):
    """rho(n) for 0 <= n <= N as an int64 array (index 0 unused)."""
    def row(chi, kmax):
        return [1] + [1 + chi] * kmax

    def exc(P_, p, k):
        return rho_p(P_, p, k) if k else 1

    return np.rint(_table(P, N, row, exc)).astype(np.int64)


def f_table(P, N):
    def row(chi, kmax):
        return [1, 1] + [0] * (kmax - 1)

    return np.rint(_table(P, N, row, f_local)).astype(np.int64)


def g_table(P, N):
    def row(chi, kmax):
        return [1, 0, -1] + [0] * (kmax - 2) if kmax >= 2 else [1, 0]

    return np.rint(_table(P, N, row, g_local)).astype(np.int64)


def chi_table(P, N):
    def row(chi, kmax):
        return [chi**k for k in range(kmax + 1)]

    def exc(P_, p, k):
        return _chi_prime(base_of(P_).delta, p) ** k

    return np.rint(_table(P, N, row, exc)).astype(np.int64)


def dirichlet_convolve(u, v):
    """(u * v)(n) for 1 <= n < len(u); index 0 ignored."""
    N = len(u) - 1
    out = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        if u[d]:
            out[d:: d] += u[d] * v[1: N // d + 1]
    return out


@dataclass(frozen=True)
class ConvolutionReport:
    N: int
    ok: bool
    first_failure: object = None

    def __str__(self):
        if self.ok:
            return f"convolution identities hold for all n <= {self.N}"
        return f"convolution identity fails: {self.first_failure}"


def convolution_check(P, N, brute_upto=200):
    """Verify rho = chi * f and f = 1 * g for 1 <= n <= N.

    The identity concerns the shifted polynomial (rho vanishes on the primes
    of 2 a delta); an unshifted polynomial is shifted first.
    """
    from p2lab.polyform import ShiftedPoly, shift_to_G

    if N > 10**5:
        raise RangeError("convolution check is limited to N <= 10^5")
    G = P if isinstance(P, ShiftedPoly) else shift_to_G(P)
    rho_vals = np.zeros(N + 1, dtype=np.int64)
    for n in range(1, N + 1):
        rho_vals[n] = rho_bruteforce(G, n) if n <= brute_upto else roots_mod(G, n).rho
    chi = np.zeros(N + 1, dtype=np.int64)
    f = np.zeros(N + 1, dtype=np.int64)
    g = np.zeros(N + 1, dtype=np.int64)
    for n in range(1, N + 1):
        chi[n] = chi_val(G, n)
        f[n] = f_val(G, n)
        g[n] = g_val(G, n)
    one = np.ones(N + 1, dtype=np.int64)
    lhs_rho = dirichlet_convolve(chi, f)
    lhs_f = dirichlet_convolve(one, g)
    for n in range(1, N + 1):
        if rho_vals[n] != lhs_rho[n]:
            return ConvolutionReport(N, False, ("rho", n, int(rho_vals[n]), int(lhs_rho[n])))
        if f[n] != lhs_f[n]:
            return ConvolutionReport(N, False, ("f", n, int(f[n]), int(lhs_f[n])))
    return ConvolutionReport(N, True)


def rho_at_primes(P, primes):
    """rho(p) for an ascending array of primes."""
    primes = np.asarray(primes, dtype=np.int64)
    g = base_of(P)
    chis = kernels.legendre(g.delta, primes)
    chis[primes == 2] = 0
    out = (1 + chis).astype(np.int64)
    for p in g.exceptional_primes():
        i = int(np.searchsorted(primes, p))
        if i < primes.size and primes[i] == p:
            out[i] = rho_p(P, p, 1)
    return out
