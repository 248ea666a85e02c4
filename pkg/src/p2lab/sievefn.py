"""Linear-sieve functions F, f and the constant W of the weighted sieve."""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.integrate import quad

from p2lab import kernels
from p2lab.characters import EXP_C, gamma_g
from p2lab.errors import DomainError, RangeError
from p2lab.polyform import base_of

TWO_EC = 2.0 * EXP_C
S_MAX = 8.0
STEP = 1e-3
_QUAD = dict(epsabs=1e-13, epsrel=1e-12, limit=200)


def _log_ratio_integral(y):
    """int_2^y log(u - 1) du / u."""
    if y <= 2.0:
        return 0.0
    return quad(lambda u: math.log(u - 1.0) / u, 2.0, y, **_QUAD)[0]


def F_closed(s):
    """F on (0, 5] from the elementary forms."""
    if not 0.0 < s <= 5.0:
        raise RangeError(f"closed form of F covers (0, 5], got s = {s}")
    if s <= 3.0:
        return TWO_EC / s
    return TWO_EC * (1.0 + _log_ratio_integral(s - 1.0)) / s


def f_closed(s):
    """f on (0, 4]."""
    if not 0.0 < s <= 4.0:
        raise RangeError(f"closed form of f covers (0, 4], got s = {s}")
    if s <= 2.0:
        return 0.0
    return TWO_EC * math.log(s - 1.0) / s


def f_closed_4_6(s):
    """f on [4, 6]: 2e^C {log(s-1) + int_3^{s-1} int_2^{t-1} log(u-1) du/u dt/t} / s."""
    if not 4.0 <= s <= 6.0:
        raise RangeError(f"this closed form of f covers [4, 6], got s = {s}")
    inner = quad(lambda t: _log_ratio_integral(t - 1.0) / t, 3.0, s - 1.0, **_QUAD)[0]
    return TWO_EC * (math.log(s - 1.0) + inner) / s


# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SieveFunctionGrid:
    step: float
    s_max: float
    s: np.ndarray
    F_values: np.ndarray
    f_values: np.ndarray
    sF: np.ndarray
    sf: np.ndarray

    def _interp(self, w, x):
        # cubic Lagrange on s*F or s*f, away from the corners at s = 2, 3
        h = self.step
        k = int(round(x / h))
        if abs(x - k * h) < 1e-12 * max(1.0, x):
            return float(w[k] / self.s[k])
        i = min(max(int(x / h) - 1, 1), len(self.s) - 4)
        xs = self.s[i:i + 4]
        ys = w[i:i + 4]
        tot = 0.0
        for a in range(4):
            term = ys[a]
            for b in range(4):
                if b != a:
                    term *= (x - xs[b]) / (xs[a] - xs[b])
            tot += term
        return float(tot / x)

    def F(self, s):
        _check_s(s, self.s_max)
        return self._interp(self.sF, s) if s > 3.0 else TWO_EC / s

    def f(self, s):
        _check_s(s, self.s_max)
        return self._interp(self.sf, s) if s > 2.0 else 0.0


def _check_s(s, s_max):
    if not 0.0 < s <= s_max:
        raise RangeError(f"s must lie in (0, {s_max}], got {s}")


@lru_cache(maxsize=8)
def build_grid(step=STEP, s_max=S_MAX):
    """Step the delay system for u = sF, v = sf on s = k*step, 0 <= s <= s_max."""
    delay = round(1.0 / step)
    if abs(delay * step - 1.0) > 1e-12 or delay < 8:
        raise DomainError("step must be 1/k for an integer k >= 8")
    n = int(round(s_max / step)) + 1
    s = np.arange(n) * step
    u = np.full(n, TWO_EC)
    v = np.zeros(n)
    iu, iv = 3 * delay, 2 * delay
    kernels.dde_loop(u, v, step, delay, iu, iv, iv)
    with np.errstate(divide="ignore", invalid="ignore"):
        F = np.where(s > 0, u / s, np.inf)
        f = np.where(s > 0, v / s, 0.0)
    return SieveFunctionGrid(step, float(s[-1]), s, F, f, u, v)


def F_of(s, grid=None):
    """F(s): exact on (0, 3], closed form with quadrature on (3, 5], stepped beyond."""
    grid = grid or build_grid()
    _check_s(s, grid.s_max)
    if s <= 5.0:
        return F_closed(s)
    return grid.F(s)


def f_of(s, grid=None):
    grid = grid or build_grid()
    _check_s(s, grid.s_max)
    if s <= 4.0:
        return f_closed(s)
    return grid.f(s)


@dataclass(frozen=True)
class DDEResidual:
    F_residual: float
    f_residual: float
    F_constant_segment: float
    f_zero_segment: float

    @property
    def max(self):
        return max(self.F_residual, self.f_residual)


def dde_residual(grid, exclude=2):
    """Centered-difference residuals of (sF)' = f(s-1) and (sf)' = F(s-1).

    Knots within ``exclude`` steps of s = 2, 3, 4 are skipped (corners).
    """
    h = grid.step
    s = grid.s
    u, v = grid.sF, grid.sf
    d = round(1.0 / h)
    i = np.arange(d + 1, len(s) - 1)
    du = (u[i + 1] - u[i - 1]) / (2 * h)
    dv = (v[i + 1] - v[i - 1]) / (2 * h)
    Fm1 = grid.F_values[i - d]
    fm1 = grid.f_values[i - d]
    near = np.zeros(i.size, dtype=bool)
    for k in (2, 3, 4):
        near |= np.abs(i - k * d) <= exclude
    upper = (s[i] > 3.0) & ~near
    lower = (s[i] > 2.0) & ~near
    const = (s[i] < 3.0) & ~near
    zero = s[1:-1] < 2.0
    zi = np.arange(1, len(s) - 1)[zero]
    return DDEResidual(
        F_residual=float(np.abs(du - fm1)[upper].max(initial=0.0)),
        f_residual=float(np.abs(dv - Fm1)[lower].max(initial=0.0)),
        F_constant_segment=float(np.abs(du)[const].max(initial=0.0)),
        f_zero_segment=float(np.abs((v[zi + 1] - v[zi - 1]) / (2 * h)).max(initial=0.0)),
    )


# ---------------------------------------------------------------------------
# the constant W

def _check_W_domain(alpha, gamma):
    if not (0.0 < gamma < 0.5 < alpha):
        raise RangeError(f"need 0 < gamma < 1/2 < alpha, got alpha={alpha}, gamma={gamma}")
    if alpha <= 1.0:
        raise RangeError(f"the reduced form needs alpha > 1 (log(alpha - 1)), got {alpha}")
    if alpha / gamma < 4.0:
        raise RangeError(f"the reduced form needs alpha/gamma >= 4, got {alpha / gamma}")


@dataclass(frozen=True)
class WValue:
    W: float
    ratio: float  # W / (2 e^C gamma)
    alpha: float
    gamma: float


def W_constant(alpha, gamma, bracket="product"):
    """W from the reduced one-dimensional integral.

    ``bracket="product"`` reads the second bracket term as
    log((1 - gamma t/(alpha - gamma)) (t + 1)), the reading that agrees with
    the four-term definition.  ``bracket="literal"`` multiplies the logarithm
    by (t + 1) instead and is kept only as a diagnostic.
    """
    alpha, gamma = float(alpha), float(gamma)
    _check_W_domain(alpha, gamma)
    a, g = alpha, gamma

    def bracket_fn(t):
        first = t * math.log(a * (t + 1.0) / ((a - g) * (t + 2.0)))
        if bracket == "product":
            return first + math.log((1.0 - g * t / (a - g)) * (t + 1.0))
        if bracket == "literal":
            return first + math.log(1.0 - g * t / (a - g)) * (t + 1.0)
        raise DomainError(f"unknown bracket reading {bracket!r}")

    top = a / g - 2.0
    integral = 0.0
    if top > 2.0:
        # log(t - 1) vanishes at t = 2, so the lower endpoint is regular
        integral = quad(lambda t: bracket_fn(t) * math.log(t - 1.0) / (t * (t + 1.0)),
                        2.0, top, **_QUAD)[0]
    ratio = math.log(a - g) - (a - 1.0) / a * math.log(a - 1.0) - integral
    return WValue(TWO_EC * g * ratio, ratio, alpha, gamma)


@dataclass(frozen=True)
class WTerms:
    f_term: float
    double_integral: float
    middle_integral: float
    last_integral: float
    W: float
    ratio: float
    ratio_as_printed: float


def W_from_integrals(alpha, gamma, grid=None):
    """W from the four-term expression with F_of / f_of and nested quadrature.

    The double integral is taken with kernel (t - u)(gamma/u) f((alpha - u - t)/u),
    which reproduces the reduced form; the kernel as typeset,
    (u - t)(gamma/t) f((alpha - u - t)/t), is evaluated alongside as a diagnostic.
    """
    alpha, gamma = float(alpha), float(gamma)
    _check_W_domain(alpha, gamma)
    grid = grid or build_grid()
    a, g = alpha, gamma
    for arg in (a / g, (a - g) / g):
        if arg > grid.s_max:
            raise RangeError(f"argument {arg} exceeds s_max = {grid.s_max}")

    def F(s):
        return F_of(s, grid)

    def f(s):
        return f_of(s, grid)

    t1 = float(f(a / g))

    def inner(t, printed=False):
        if printed:
            fn = lambda u: (u - t) * (g / t) * f((a - u - t) / t) / u
        else:
            fn = lambda u: (t - u) * (g / u) * f((a - u - t) / u) / u
        return quad(fn, g, t, **_QUAD)[0]

    t2 = quad(lambda t: inner(t) / t, g, 0.5, **_QUAD)[0]
    t2p = quad(lambda t: inner(t, True) / t, g, 0.5, **_QUAD)[0]
    t3 = quad(lambda u: ((1 - 2 * u) * (g / u) * F((a - u) / u) + u * F((a - u) / g)) / u,
              g, 0.5, **_QUAD)[0]
    t4 = quad(lambda u: (1 - u) * F((a - u) / g) / u, 0.5, 1.0, **_QUAD)[0]
    W = t1 + t2 - t3 - t4
    norm = TWO_EC * g
    return WTerms(t1, t2, t3, t4, W, W / norm, (t1 + t2p - t3 - t4) / norm)


def theorem_threshold(g, x):
    """(Gamma_g / 77) x / log x."""
    if x <= 1:
        raise DomainError(f"x must exceed 1, got {x}")
    return gamma_g(base_of(g)) / 77.0 * x / math.log(x)
