"""Executable forms of the analytic lemmas: Gaussian pairs, Kloosterman-type
sums, the Fourier smoothing of an interval indicator, and equidistribution
counts of polynomial roots."""
from collections import defaultdict
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import zeta

from p2lab import characters, kernels, localroots, ntcore
from p2lab.errors import DomainError, RangeError
from p2lab.polyform import QuadraticPoly

N2P1 = QuadraticPoly(1, 0, 1)


# ---------------------------------------------------------------------------
# D = r^2 + s^2 with (r, s) = 1, |r| < s, and roots of Omega^2 + 1 = 0 (mod D)

@dataclass(frozen=True)
class GaussPair:
    r: int
    s: int

    @property
    def D(self):
        return self.r * self.r + self.s * self.s


def gauss_pairs(D):
    if D < 1 or D % 2 == 0:
        raise DomainError(f"D must be odd and positive, got {D}")
    out = []
    for s in range(math.isqrt(D // 2), math.isqrt(D) + 1):
        if s < 1 or 2 * s * s <= D:
            continue
        r = math.isqrt(D - s * s)
        if r * r != D - s * s or r >= s or math.gcd(r, s) != 1:
            continue
        out.append(GaussPair(r, s))
        if r:
            out.append(GaussPair(-r, s))
    return sorted(out, key=lambda g: (g.s, g.r))


def omega_from_pair(pair):
    """((rbar D - r)/s) mod D, rbar the inverse of r mod s."""
    r, s, D = pair.r, pair.s, pair.D
    if s < 1:
        raise DomainError(f"s must be positive, got {s}")
    rbar = pow(r, -1, s) if s > 1 else 0
    num = rbar * D - r
    if num % s:
        raise DomainError(f"({r}, {s}) does not divide exactly; gcd(r, s) must be 1")
    return (num // s) % D


@dataclass(frozen=True)
class CorrespondenceReport:
    D_max: int
    ok: bool
    moduli: int
    pairs: int
    first_failure: object = None


def correspondence_check(D_max):
    """For each odd D <= D_max, pairs map bijectively onto the roots of n^2 + 1 mod D."""
    if D_max > 10**6:
        raise RangeError("correspondence check is limited to D_max <= 10^6")
    images = defaultdict(list)
    npairs = 0
    for s in range(1, math.isqrt(D_max) + 1):
        for r in range(-s + 1, s):
            D = r * r + s * s
            if D > D_max or D % 2 == 0 or math.gcd(r, s) != 1:
                continue
            images[D].append(omega_from_pair(GaussPair(r, s)))
            npairs += 1
    for D in range(1, D_max + 1, 2):
        got = images.get(D, [])
        roots = list(localroots.roots_mod(N2P1, D).roots)
        if len(set(got)) != len(got) or sorted(got) != roots:
            return CorrespondenceReport(D_max, False, D // 2 + 1, npairs, (D, sorted(got), roots))
    return CorrespondenceReport(D_max, True, (D_max + 1) // 2, npairs)


# ---------------------------------------------------------------------------
# sum_{r1 < r < r2, (r, s) = 1, r = lam (Lam)} e(h rbar / s)

def _kloosterman(hs, s, r1, r2, lam, Lam):
    re, im = kernels.kloosterman(np.asarray(hs, dtype=np.int64), s, r1, r2, lam, Lam)
    return re + 1j * im


def incomplete_kloosterman(h, s, r1, r2, lam=0, Lam=1):
    if s < 1 or Lam < 1:
        raise DomainError("s and Lam must be positive")
    if not 0 < r2 - r1 < 2 * s:
        raise DomainError(f"need 0 < r2 - r1 < 2s, got r1={r1}, r2={r2}, s={s}")
    return complex(_kloosterman([h], s, r1, r2, lam, Lam)[0])


def complete_kloosterman(hs, s):
    """sum over reduced residues r mod s of e(h rbar/s), for each h in ``hs``."""
    return _kloosterman(hs, s, 0, s + 1, 0, 1)


def ramanujan(s, h):
    """c_s(h) = mu(s/(s,h)) phi(s)/phi(s/(s,h))."""
    t = s // math.gcd(s, h)
    return ntcore.mobius(t) * ntcore.euler_phi(s) // ntcore.euler_phi(t)


@dataclass(frozen=True)
class HooleyRow:
    s: int
    h: int
    max_ratio: float
    complete_sum: float
    ramanujan: int


def hooley_ratio_scan(s_max, h_max, samples=4, seed=0, Lam_max=8):
    """max |S| / (s^(1/2) (h,s)^(1/2) tau(s)) over random incomplete ranges.

    The implied constant of the bound is unspecified, so the table is a
    diagnostic.  The same seed always gives the same table.
    """
    if s_max > 5000:
        raise RangeError("scan is limited to s_max <= 5000")
    rng = np.random.default_rng(seed)
    hs = np.arange(1, h_max + 1, dtype=np.int64)
    rows = []
    for s in range(1, s_max + 1):
        tau = ntcore.num_divisors(s)
        best = np.zeros(h_max)
        for _ in range(samples):
            length = int(rng.integers(1, 2 * s)) if s > 1 else 1
            r1 = int(rng.integers(-s, s + 1))
            Lam = int(rng.integers(1, Lam_max + 1))
            lam = int(rng.integers(0, Lam))
            vals = _kloosterman(hs, s, r1, r1 + length, lam, Lam)
            best = np.maximum(best, np.abs(vals))
        comp = complete_kloosterman(hs, s).real
        gs = np.gcd(hs, s).astype(np.float64)
        ratio = best / (math.sqrt(s) * np.sqrt(gs) * tau)
        for j, h in enumerate(hs.tolist()):
            rows.append(HooleyRow(s, h, float(ratio[j]), float(comp[j]), ramanujan(s, h)))
    return rows


# ---------------------------------------------------------------------------
# smoothing: A = psi * k_{C/4}, B = (1/2)(1_{|t-alpha|<=C/2} + 1_{|t-beta|<=C/2}) * k_{C/4},
# k_w the unit-mass triangle of half-width w, so that |psi - A| <= B

def _sinc(x):
    return np.sinc(x)  # sin(pi x)/(pi x)


def C_h(h, C):
    h = np.abs(np.asarray(h, dtype=np.float64))
    return np.minimum(1.0 / h, C**-2 / h**3)


def tail_bound(H, C):
    """sum_{|h| > H} 2 C_h."""
    h0 = max(H + 1, math.ceil(1.0 / C))
    harmonic = math.fsum(1.0 / h for h in range(H + 1, h0))
    cubic = C**-2 * float(zeta(3, h0))
    return 4.0 * (harmonic + cubic)


@dataclass(frozen=True, eq=False)
class SmoothApprox:
    """Coefficients of A and B for h = 1..H (h = 0 stored separately).

    The functions are real, so the coefficient at -h is the conjugate of the
    one at h.
    """
    alpha: float
    beta: float
    C: float
    H: int
    A0: float
    B0: float
    A_coeffs: np.ndarray
    B_coeffs: np.ndarray

    def evaluate(self, t, which="A"):
        c0, cs = (self.A0, self.A_coeffs) if which == "A" else (self.B0, self.B_coeffs)
        t = np.asarray(t, dtype=np.float64)
        h = np.arange(1, self.H + 1)
        out = np.empty(t.shape)
        for i in range(0, t.size, 512):
            ph = np.exp(2j * np.pi * np.outer(t[i:i + 512], h))
            out[i:i + 512] = c0 + 2.0 * (ph @ cs).real
        return out


def smooth_build(alpha, beta, C, H):
    alpha, beta, C = float(alpha), float(beta), float(C)
    if not (2 * C < beta - alpha < 1 - 2 * C):
        raise DomainError(f"need 2C < beta - alpha < 1 - 2C, got C={C}, beta-alpha={beta - alpha}")
    if not (0.0 <= alpha < beta < 1.0):
        raise DomainError("need 0 <= alpha < beta < 1")
    if H < 1:
        raise DomainError("H must be >= 1")
    h = np.arange(1, H + 1, dtype=np.float64)
    w = C / 4.0
    ea, eb = np.exp(-2j * np.pi * h * alpha), np.exp(-2j * np.pi * h * beta)
    A = (ea - eb) / (2j * np.pi * h) * _sinc(h * w) ** 2
    B = 0.5 * _sinc(h * w) ** 2 * np.sin(np.pi * h * C) / (np.pi * h) * (ea + eb)
    return SmoothApprox(alpha, beta, C, H, beta - alpha, C, A, B)


@dataclass(frozen=True)
class SmoothReport:
    points: int
    ok: bool
    coeffs_ok: bool
    max_excess: float
    tail: float
    worst_t: float


def psi(t, alpha, beta):
    """Indicator of [alpha, beta) extended with period 1."""
    t = np.mod(t, 1.0)
    return ((t >= alpha) & (t < beta)).astype(np.float64)


def smooth_verify(sa, grid_points=10_000):
    """|psi - A_H| <= B_H + tail(H) on a uniform grid, and |A_h|, |B_h| <= C_h."""
    t = np.arange(grid_points) / grid_points
    A = sa.evaluate(t, "A")
    B = sa.evaluate(t, "B")
    tail = tail_bound(sa.H, sa.C)
    excess = np.abs(psi(t, sa.alpha, sa.beta) - A) - (B + tail)
    k = int(np.argmax(excess))
    ch = C_h(np.arange(1, sa.H + 1), sa.C)
    coeffs_ok = bool(np.all(np.abs(sa.A_coeffs) <= ch) and np.all(np.abs(sa.B_coeffs) <= ch)
                     and abs(sa.A0) <= 1 and sa.B0 == sa.C)
    return SmoothReport(grid_points, bool(excess[k] <= 0.0) and coeffs_ok, coeffs_ok,
                        float(excess[k]), tail, float(t[k]))


# ---------------------------------------------------------------------------
# P(M1, M; q, d, mu, omega, alpha, beta)

@dataclass(frozen=True)
class EquidistResult:
    count: int
    main_term: float
    rel_dev: float
    main_term_derived: float


def _rel(count, main):
    if main > 0:
        return abs(count - main) / main
    return 0.0 if count == 0 else math.inf


def equidist_count(G, q, d, mu, omega, alpha, beta, M, M1):
    """Pairs (m, Omega) with M < m < M1, (m, q) = 1, m = mu (d),
    alpha m q <= Omega < beta m q, G(Omega) = 0 (mod mq), Omega = omega (d).

    ``main_term`` is S_G (beta - alpha)(M1 - M) rho(q/d) A(q)/phi(d).
    ``main_term_derived`` replaces A(q) by phi(q)/q, the density the count
    itself implies; the two agree for q = 1.
    """
    if q < 1 or not ntcore.is_squarefree(q):
        raise DomainError(f"q must be squarefree, got {q}")
    if d < 1 or q % d or d % 2 == 0:
        raise DomainError(f"d must be an odd divisor of q, got d={d}, q={q}")
    if math.gcd(d, mu) != 1:
        raise DomainError(f"need (d, mu) = 1, got d={d}, mu={mu}")
    if G(omega) % d:
        raise DomainError(f"omega = {omega} is not a root of G mod {d}")
    if not (M < M1 <= 2 * M):
        raise DomainError(f"need M < M1 <= 2M, got M={M}, M1={M1}")
    if not (0.0 <= alpha <= beta <= 1.0):
        raise DomainError("need 0 <= alpha <= beta <= 1")
    if M1 * q > 10**8:
        raise RangeError("brute-force scale limited to M1 q <= 10^8")
    S = characters.singular_series(G, q)
    base = S * (beta - alpha) * (M1 - M) * localroots.rho(G, q // d) / ntcore.euler_phi(d)
    main = base * float(characters.A_fun(q))
    derived = base * ntcore.euler_phi(q) / q

    if beta == alpha:
        count = 0
    elif q == 1 and alpha == 0.0 and beta == 1.0:
        count = mean_rho_count(G, M, M1)
    else:
        count = 0
        for m in range(M + 1, M1):
            if math.gcd(m, q) != 1 or (m - mu) % d:
                continue
            mq = m * q
            lo, hi = alpha * mq, beta * mq
            for r in localroots.roots_mod(G, mq).roots:
                if lo <= r < hi and (r - omega) % d == 0:
                    count += 1
    return EquidistResult(count, main, _rel(count, main), derived)


def mean_rho_count(G, M, M1):
    """sum_{M < m < M1} rho(m): the count with q = d = 1 over the full window."""
    return int(localroots.rho_table(G, M1)[M + 1:M1].sum())
