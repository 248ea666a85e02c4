import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from p2lab import localroots, ntcore
from p2lab.errors import DomainError, RangeError
from p2lab.polyform import QuadraticPoly, shift_to_G

N2P1 = QuadraticPoly(1, 0, 1)


def test_rho_p_examples(G256):
    assert localroots.rho_p(G256, 5, 1) == 2
    assert localroots.rho_p(G256, 2, 1) == 0
    assert localroots.rho_p(N2P1, 3, 2) == 0


def test_roots_mod_examples(polys):
    assert localroots.roots_mod(N2P1, 65).roots == (8, 18, 47, 57)
    assert localroots.roots_mod(N2P1, 25).roots == (7, 18)
    for P in polys:
        rs = localroots.roots_mod(P, 1)
        assert rs.roots == (0,) and rs.rho == 1
    with pytest.raises(DomainError):
        localroots.roots_mod(N2P1, 0)
    with pytest.raises(RangeError):
        localroots.roots_mod(N2P1, 1 << 63)


def test_bruteforce_examples():
    assert localroots.rho_bruteforce(N2P1, 5) == 2
    assert localroots.rho_bruteforce(N2P1, 3) == 0
    assert localroots.rho_bruteforce(QuadraticPoly(2, 2, 1), 1) == 1
    with pytest.raises(RangeError):
        localroots.rho_bruteforce(N2P1, 10**6 + 1)


@pytest.mark.parametrize("shift", [False, True])
def test_roots_against_bruteforce(polys, shift):
    for g in polys:
        P = shift_to_G(g) if shift else g
        for d in range(1, 1500):
            rs = localroots.roots_mod(P, d)
            assert rs.roots == localroots.roots_bruteforce(P, d), (P, d)
            assert rs.rho == localroots.rho(P, d)


def test_large_modulus_roots_verify():
    for d in (10**12 + 39, 2**40 * 5**3, 65**7):
        for r in localroots.roots_mod(N2P1, d).roots:
            assert (r * r + 1) % d == 0


def test_multiplicativity(polys):
    rng = random.Random(1)
    pairs = 0
    while pairs < 10**4:
        m, n = rng.randrange(1, 1000), rng.randrange(1, 1000)
        if math.gcd(m, n) != 1:
            continue
        pairs += 1
        P = polys[pairs % 3]
        assert localroots.roots_mod(P, m * n).rho == localroots.roots_mod(P, m).rho * localroots.roots_mod(P, n).rho


def test_squarefree_character_product(G256):
    delta = G256.delta
    for d in range(1, 3000):
        if math.gcd(d, 2 * delta) == 1 and ntcore.is_squarefree(d):
            want = math.prod(1 + localroots.chi_val(G256, p) for p in ntcore.prime_divisors(d))
            assert localroots.rho(G256, d) == want


def test_rho_below_p(polys):
    for P in polys:
        for p in ntcore.primes_up_to(10**4).primes.tolist():
            assert 0 <= localroots.rho_p(P, p) < p


def test_f_g_tables():
    assert localroots.f_val(N2P1, 12) == 0
    for p in (5, 13, 3, 7):
        assert localroots.f_local(N2P1, p, 1) == 1
        assert localroots.g_local(N2P1, p, 2) == -1
    # p | delta: f(p^r) = 0, g = (1, -1, 0, ...)
    g = QuadraticPoly(1, 0, 3)  # delta = -12
    assert [localroots.f_local(g, 3, k) for k in range(4)] == [1, 0, 0, 0]
    assert [localroots.g_local(g, 3, k) for k in range(4)] == [1, -1, 0, 0]
    # p | 2a, p not dividing delta: g = (1, -2, 1) for chi = 1, (1, 0, -1) for chi = -1
    g = QuadraticPoly(3, 1, 5)  # delta = -59, p = 3
    chi = localroots.chi_val(g, 3)
    want = [1, -2, 1, 0] if chi == 1 else [1, 0, -1, 0]
    assert [localroots.g_local(g, 3, k) for k in range(4)] == want


def test_tables_match_scalars(polys, G256):
    N = 3000
    for P in polys + (G256,):
        rt, ft, gt, ct = (localroots.rho_table(P, N), localroots.f_table(P, N),
                          localroots.g_table(P, N), localroots.chi_table(P, N))
        for n in range(1, N + 1):
            assert rt[n] == localroots.rho(P, n)
            assert ft[n] == localroots.f_val(P, n)
            assert gt[n] == localroots.g_val(P, n)
            assert ct[n] == localroots.chi_val(P, n)


def test_convolution_examples():
    rep = localroots.convolution_check(N2P1, 2000)
    assert rep.ok
    assert localroots.convolution_check(QuadraticPoly(1, 0, -2), 1000).ok
    with pytest.raises(RangeError):
        localroots.convolution_check(N2P1, 10**5 + 1)
    # n = 65: sum over d | 65 of chi(d) f(65/d) = 4
    G = shift_to_G(N2P1)
    terms = [localroots.chi_val(G, d) * localroots.f_val(G, 65 // d) for d in ntcore.divisors(65)]
    assert terms == [1, 1, 1, 1] and localroots.rho(G, 65) == 4


def test_g_partial_sums_grow_like_sqrt(G256):
    g = localroots.g_table(G256, 10**6)
    c = np.cumsum(np.abs(g[1:]))
    fitted = [c[B - 1] / math.sqrt(B) for B in (10**3, 10**4, 10**5, 10**6)]
    assert max(fitted) / min(fitted) < 1.5


def test_rho_at_primes(polys):
    primes = ntcore.primes_up_to(5000).primes
    for P in polys:
        assert localroots.rho_at_primes(P, primes).tolist() == [localroots.rho_p(P, p) for p in primes.tolist()]


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 30), st.integers(-30, 30), st.integers(-30, 30), st.integers(1, 4000))
def test_roots_property(a, b, c, d):
    g = QuadraticPoly(a, b, c)
    rs = localroots.roots_mod(g, d)
    assert list(rs.roots) == sorted(set(rs.roots))
    assert rs.roots == localroots.roots_bruteforce(g, d)
