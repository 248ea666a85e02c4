"""The character chi_delta, L(1, chi), and the Euler-product density constants."""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import math
from typing import NamedTuple

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from p2lab import localroots, ntcore
from p2lab.errors import DomainError
from p2lab.polyform import ShiftedPoly, base_of, require_admissible

EULER_C = 0.577215664901533
EXP_C = 1.781072417990198
EXP_NEG_C = 0.561459483566885


class Estimate(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class CharacterContext:
    """chi(n) = 0 if gcd(n, 2 delta) > 1, else the Jacobi symbol (delta / n)."""
    delta: int

    def __post_init__(self):
        if self.delta == 0 or ntcore.is_square(self.delta):
            raise DomainError(f"delta = {self.delta} gives a principal character")

    @property
    def modulus(self):
        return 4 * abs(self.delta)

    @cached_property
    def period(self):
        q = self.modulus
        out = np.zeros(q, dtype=np.int64)
        for n in range(1, q, 2):
            if math.gcd(n, self.delta) == 1:
                out[n] = ntcore.jacobi(self.delta, n)
        return out

    def __call__(self, n):
        return int(self.period[n % self.modulus])

    def values(self, ns):
        return self.period[np.asarray(ns, dtype=np.int64) % self.modulus]

    def prime_values(self, primes):
        """Mapping p -> chi(p)."""
        return dict(zip((int(p) for p in primes), self.values(primes).tolist()))

    @cached_property
    def L1(self):
        return L1_value(self, 1e-12)


def context_for(P):
    return CharacterContext(base_of(P).delta)


def chi(ctx, n):
    if n < 1:
        raise DomainError(f"chi is evaluated at n >= 1, got {n}")
    return ctx(n)


def L1_value(ctx, tol=1e-10):
    """L(1, chi) by K whole-period blocks plus an expanded tail.

    With x = j/q, sum_{k>=K} 1/(q(k + x)) = (1/q) sum_m (-x)^m zeta(m + 1, K);
    the m = 0 term cancels over a period since chi sums to zero.  Truncating
    after order M leaves at most sum_{m>M} 2/K^m = 2/(K^M (K - 1)).
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    q = ctx.modulus
    per = ctx.period.astype(np.float64)
    K = 32
    M = 1
    while 2.0 / (float(K) ** M * (K - 1)) > tol and M < 40:
        M += 1
    err = 2.0 / (float(K) ** M * (K - 1))
    j = np.arange(q, dtype=np.float64)
    n = np.arange(K, dtype=np.float64)[:, None] * q + j[None, :]
    n[0, 0] = 1.0  # chi(0) = 0
    total = math.fsum((per[None, :] / n).ravel())
    x = j / q
    xm = np.ones(q)
    tail = []
    for m in range(1, M + 1):
        xm = xm * x
        tail.append((-1) ** m * float(np.dot(per, xm)) * float(hurwitz_zeta(m + 1, K)))
    total += math.fsum(tail) / q
    return Estimate(total, err)


def A_fun(q):
    """A(q) = (phi(q)/q)^2 / gcd(2, q), exactly."""
    if q < 1:
        raise DomainError(f"q must be positive, got {q}")
    return Fraction(ntcore.euler_phi(q), q) ** 2 / math.gcd(2, q)


# ---------------------------------------------------------------------------
# Gamma: (1/deg) prod_p (1 - rho(p)/p)(1 - 1/p)^{-1}

def _tail_bound(P):
    return 2.0 / (P * math.log(P))


def gamma_product(primes, rho_vals, chi_vals, L1, deg=2):
    """(1/deg) * prod over ``primes`` of the Gamma factor, with the primes past
    the table replaced through L(1, chi) divided by its partial Euler product."""
    p = np.asarray(primes, dtype=np.float64)
    log_main = np.sum(np.log1p(-np.asarray(rho_vals) / p) - np.log1p(-1.0 / p))
    log_chi = np.sum(np.log1p(-np.asarray(chi_vals) / p))
    return math.exp(log_main - log_chi) / (L1 * deg)


def gamma_estimate(P, target_tol=1e-6):
    """Gamma for P (a polynomial g or its shift G) with its error bound."""
    require_admissible(base_of(P))
    ctx = context_for(P)
    L = ctx.L1
    Pmax = max([10_000] + base_of(P).exceptional_primes())
    while _tail_bound(Pmax) > target_tol / 4 and Pmax < 1 << 30:
        Pmax *= 2
    primes = ntcore.primes_up_to(Pmax).primes
    val = gamma_product(primes, localroots.rho_at_primes(P, primes), ctx.values(primes), L.value)
    # |log prod_{p>P} E_p| <= sum_{p>P} 2/p^2 and L enters as a reciprocal
    err = val * (math.expm1(_tail_bound(Pmax)) + L.error / L.value)
    return Estimate(val, err), Pmax


def gamma_g(g, target_tol=1e-6):
    return gamma_estimate(g, target_tol)[0].value


def gamma_raw(P, limit):
    """Plain truncated product over p <= limit (test oracle, slow convergence)."""
    primes = ntcore.primes_up_to(limit).primes
    rho = localroots.rho_at_primes(P, primes)
    p = primes.astype(np.float64)
    return 0.5 * math.exp(np.sum(np.log1p(-rho / p) - np.log1p(-1.0 / p)))


# ---------------------------------------------------------------------------
# the singular series

def _local_rho_sum(P, p, kmax=None):
    """sum_k rho(p^k) p^-k at an exceptional prime (1 for the shifted G)."""
    if kmax is None:
        kmax = max(2, int(50 / math.log2(p)))
    return 1.0 + math.fsum(localroots.rho_p(P, p, k) / float(p) ** k for k in range(1, kmax + 1))


def curly_G(P, q=1):
    """The Euler-product constant multiplying L(1, chi) in the singular series.

    Exceptional primes p not dividing q contribute
    ``s_p (1 - chi(p)/p)(1 - 1/p) / (1 - 1/p^2)`` with s_p = sum_k rho(p^k)/p^k;
    for the shifted G, s_p = 1 and this is ``1 - (1 + chi)/p + chi/p^2``.
    """
    if q < 1 or not ntcore.is_squarefree(q):
        raise DomainError(f"q must be a positive squarefree integer, got {q}")
    ctx = context_for(P)
    bad = set(base_of(P).exceptional_primes())
    qp = set(ntcore.prime_divisors(q))
    out = 6.0 / math.pi**2
    for p in sorted(bad | qp):
        out /= 1.0 - 1.0 / p**2
    for p in sorted(bad - qp):
        c = ctx(p)
        sp = 1.0 if isinstance(P, ShiftedPoly) else _local_rho_sum(P, p)
        out *= sp * (1.0 - c / p) * (1.0 - 1.0 / p)
    return out


def singular_series(P, q=1, tol=1e-10):
    """S(q) = curly_G(q) * L(1, chi) * prod_{p | q} (1 - chi(p)/p).

    S(q) is the mean of rho(m) over m coprime to q.  A q-factor that vanishes
    gives S = 0, which is legitimate (rho(q) = 0 carries no information here).
    """
    ctx = context_for(P)
    L = ctx.L1 if tol >= 1e-12 else L1_value(ctx, tol)
    out = curly_G(P, q) * L.value
    for p in ntcore.prime_divisors(q):
        out *= 1.0 - ctx(p) / p
    return out


@dataclass(frozen=True)
class DensityConstants:
    gamma_g: float
    singular_series: dict = field(default_factory=dict)
    curly_G: float = 0.0
    truncation_prime: int = 0
    error_estimate: float = 0.0


def density_constants(P, qs=(1,), target_tol=1e-6):
    est, Pmax = gamma_estimate(P, target_tol)
    return DensityConstants(
        gamma_g=est.value,
        singular_series={q: singular_series(P, q) for q in qs},
        curly_G=curly_G(P, 1),
        truncation_prime=Pmax,
        error_estimate=est.error,
    )


# ---------------------------------------------------------------------------
# Mertens product and Nagel sums

def mertens_V(P, z):
    """prod_{p < z} (1 - rho(p)/p)."""
    if z < 2:
        raise DomainError(f"z must be >= 2, got {z}")
    if z <= 2:
        return 1.0
    primes = ntcore.primes_up_to(max(2, math.ceil(z) - 1)).below(z)
    rho = localroots.rho_at_primes(P, primes)
    return math.exp(float(np.sum(np.log1p(-rho / primes.astype(np.float64)))))


def mertens_ratio(P, z, gamma=None):
    """V(z) log z / (Gamma e^{-C}); Gamma defaults to gamma_g(P)."""
    if gamma is None:
        gamma = gamma_g(P)
    return mertens_V(P, z) * math.log(z) / (gamma * EXP_NEG_C)


def _nagel_terms(P, t):
    if t < 2:
        raise DomainError(f"t must be >= 2, got {t}")
    if t <= 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    primes = ntcore.primes_up_to(max(2, math.ceil(t) - 1)).below(t)
    return primes, localroots.rho_at_primes(P, primes)


def nagel_sums(P, t):
    """(L(t), P(t)) = (sum_{p<t} rho(p) log p / p, sum_{p<t} rho(p)/p)."""
    primes, rho = _nagel_terms(P, t)
    if primes.size == 0:
        return 0.0, 0.0
    p = primes.astype(np.float64)
    return math.fsum(rho * np.log(p) / p), math.fsum(rho / p)


def nagel_max_deviation(P, t0, t1):
    """sup over t0 <= t <= t1 of |L(t) - log t|.

    L is a step function jumping just after each prime, so the supremum is
    attained at t0, t1, or one-sided at a prime p (before and after its jump).
    """
    primes, rho = _nagel_terms(P, t1)
    p = primes.astype(np.float64)
    steps = rho * np.log(p) / p
    after = np.cumsum(steps)
    before = after - steps
    inside = (primes >= t0) & (primes <= t1)
    logp = np.log(p[inside])
    cand = [np.abs(before[inside] - logp).max(initial=0.0),
            np.abs(after[inside] - logp).max(initial=0.0)]
    for t in (t0, t1):
        k = int(np.searchsorted(primes, t, side="left"))
        cand.append(abs((after[k - 1] if k else 0.0) - math.log(t)))
    return float(max(cand))
