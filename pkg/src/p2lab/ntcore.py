"""Integer arithmetic shared by every other module."""
from dataclasses import dataclass
from functools import reduce
import math
import random

import numpy as np

from p2lab import kernels
from p2lab.errors import DomainError, RangeError

SEGMENT = 1 << 18
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
U64 = 1 << 64


@dataclass(frozen=True, eq=False)
class PrimeTable:
    limit: int
    primes: np.ndarray

    def __len__(self):
        return int(self.primes.size)

    def __iter__(self):
        return iter(self.primes.tolist())

    def below(self, bound):
        """Primes strictly less than ``bound``."""
        return self.primes[: np.searchsorted(self.primes, bound, side="left")]


def primes_up_to(limit, segment=SEGMENT):
    """All primes <= limit, generated segment by segment."""
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"empty prime table: limit {limit} < 2")
    root = math.isqrt(limit)
    small = np.ones(root + 1, dtype=np.bool_)
    small[:2] = False
    for i in range(2, math.isqrt(root) + 1):
        if small[i]:
            small[i * i:: i] = False
    base = np.nonzero(small)[0].astype(np.int64)
    chunks = []
    lo = 0
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        mark = kernels.sieve_segment(lo, hi, base)
        chunks.append(np.nonzero(mark)[0].astype(np.int64) + lo)
        lo = hi
    return PrimeTable(limit, np.concatenate(chunks))


def jacobi(a, n):
    """Jacobi symbol (a/n) for odd n >= 1; negative ``a`` is reduced mod n."""
    if n <= 0 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod(a, p):
    """Square root of ``a`` modulo the prime ``p`` (Tonelli-Shanks).

    Returns the smaller of the two roots, or None for a non-residue.
    """
    a %= p
    if a == 0 or p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


def crt(pairs):
    """Combine (residue, modulus) pairs with pairwise coprime moduli."""
    x, mod = 0, 1
    for r, m in pairs:
        if m <= 0:
            raise DomainError(f"modulus must be positive, got {m}")
        if math.gcd(mod, m) != 1:
            raise DomainError(f"moduli {mod} and {m} are not coprime")
        # x + mod*k = r (mod m)
        k = (r - x) * pow(mod, -1, m) % m if m > 1 else 0
        x += mod * k
        mod *= m
    return x % mod, mod


def is_prime_u64(n):
    """Deterministic Miller-Rabin for 0 < n < 2**64."""
    if n >= U64:
        raise RangeError(f"{n} does not fit in 64 bits")
    if n <= 0:
        raise DomainError(f"primality is defined here for positive n, got {n}")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in kernels.MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pollard_brent(n, seed=1):
    """A nontrivial factor of the odd composite ``n``."""
    rng = random.Random(seed)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n):
    """Prime factors of n with multiplicity, ascending.  factorize(1) == []."""
    if n <= 0:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    if n >= U64:
        raise RangeError(f"{n} does not fit in 64 bits")
    out = []
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out.append(p)
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime_u64(m):
            out.append(m)
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        f = pollard_brent(m)
        stack += [f, m // f]
    return sorted(out)


def factor_pairs(n):
    """factorize(n) grouped as [(p, e), ...]."""
    out = []
    for p in factorize(n):
        if out and out[-1][0] == p:
            out[-1][1] += 1
        else:
            out.append([p, 1])
    return [(p, e) for p, e in out]


def prime_divisors(n):
    return sorted(set(factorize(abs(n)))) if n else []


def is_squarefree(n):
    return all(e == 1 for _, e in factor_pairs(n))


def mobius(n):
    fp = factor_pairs(n)
    if any(e > 1 for _, e in fp):
        return 0
    return -1 if len(fp) % 2 else 1


def euler_phi(n):
    return reduce(lambda acc, pe: acc * (pe[0] - 1) * pe[0] ** (pe[1] - 1), factor_pairs(n), 1)


def num_divisors(n):
    return reduce(lambda acc, pe: acc * (pe[1] + 1), factor_pairs(n), 1)


def divisors(n):
    divs = [1]
    for p, e in factor_pairs(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_square(n):
    return n >= 0 and math.isqrt(n) ** 2 == n
