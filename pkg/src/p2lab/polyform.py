"""Quadratic polynomials g(n) = a n^2 + b n + c and the shift G(n) = g(sn + t)."""
from dataclasses import dataclass
import math

from p2lab import ntcore
from p2lab.errors import DomainError


@dataclass(frozen=True)
class QuadraticPoly:
    a: int
    b: int
    c: int

    @classmethod
    def parse(cls, text):
        """Parse the CLI form ``"a,b,c"``."""
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 3:
            raise DomainError(f"polynomial must be 'a,b,c', got {text!r}")
        try:
            a, b, c = (int(p) for p in parts)
        except ValueError:
            raise DomainError(f"polynomial coefficients must be integers, got {text!r}") from None
        return cls(a, b, c)

    def __call__(self, n):
        return (self.a * n + self.b) * n + self.c

    @property
    def delta(self):
        return discriminant(self)

    @property
    def content(self):
        return math.gcd(self.a, self.b, self.c)

    @property
    def c_odd(self):
        # the theorem as stated assumes odd c; recorded, not enforced
        return self.c % 2 == 1

    @property
    def has_fixed_divisor_2(self):
        return self.c % 2 == 0 and (self.a + self.b) % 2 == 0

    @property
    def size_constant(self):
        """Least D with |g(n)| <= D n^2 for n >= 1 (coefficient-sum bound)."""
        return abs(self.a) + abs(self.b) + abs(self.c)

    def exceptional_primes(self):
        """Primes dividing 2 a delta."""
        return ntcore.prime_divisors(2 * self.a * self.delta)

    def __str__(self):
        return f"{self.a}n^2{self.b:+d}n{self.c:+d}"


@dataclass(frozen=True)
class ShiftedPoly:
    base: QuadraticPoly
    s: int
    t: int
    A: int
    B: int
    C: int

    @property
    def poly(self):
        return QuadraticPoly(self.A, self.B, self.C)

    def __call__(self, n):
        return (self.A * n + self.B) * n + self.C

    @property
    def delta(self):
        # character data comes from g; delta_G = s^2 delta_g carries the same symbol off s
        return self.base.delta

    @property
    def size_constant(self):
        return abs(self.A) + abs(self.B) + abs(self.C)

    def exceptional_primes(self):
        return self.base.exceptional_primes()

    def __str__(self):
        return f"{self.A}n^2{self.B:+d}n{self.C:+d}"


def as_quadratic(P):
    """Coefficients of P as a plain QuadraticPoly (G itself for a shifted poly)."""
    return P.poly if isinstance(P, ShiftedPoly) else P


def base_of(P):
    return P.base if isinstance(P, ShiftedPoly) else P


def discriminant(g):
    return g.b * g.b - 4 * g.a * g.c


def is_admissible(g):
    """(ok, reason) for the hypotheses: a > 0, irreducible, no fixed prime divisor."""
    if g.a <= 0:
        return False, "leading coefficient must be positive"
    if ntcore.is_square(discriminant(g)):
        return False, f"reducible: discriminant {discriminant(g)} is a perfect square"
    if g.content != 1:
        return False, f"fixed prime divisor: coefficients share the factor {g.content}"
    if g.has_fixed_divisor_2:
        return False, "fixed prime divisor 2: g(0) and g(1) are both even"
    return True, "admissible"


def require_admissible(g):
    ok, reason = is_admissible(g)
    if not ok:
        raise DomainError(f"{g} is not admissible: {reason}")


def shift_to_G(g):
    """Build G(n) = g(sn + t) with s = |4 a delta| and the least valid t."""
    require_admissible(g)
    s = abs(4 * g.a * discriminant(g))
    t = next((t for t in range(s) if math.gcd(g(t), s) == 1), None)
    if t is None:  # pragma: no cover - impossible for admissible g
        raise DomainError(f"no residue class mod {s} avoids the primes of {s}")
    A = g.a * s * s
    B = s * (2 * g.a * t + g.b)
    C = g(t)
    return ShiftedPoly(g, s, t, A, B, C)
