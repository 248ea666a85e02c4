import pytest
from hypothesis import given, strategies as st

from p2lab import localroots
from p2lab.errors import DomainError
from p2lab.polyform import QuadraticPoly, discriminant, is_admissible, shift_to_G

ADMISSIBLE = [QuadraticPoly(1, 0, 1), QuadraticPoly(2, 2, 1), QuadraticPoly(1, 1, 1),
              QuadraticPoly(1, 0, -2), QuadraticPoly(3, 1, 5)]


def test_discriminant():
    assert discriminant(QuadraticPoly(1, 0, 1)) == -4
    assert discriminant(QuadraticPoly(1, 0, -2)) == 8
    assert discriminant(QuadraticPoly(2, 2, 1)) == -4


def test_admissibility():
    assert is_admissible(QuadraticPoly(1, 0, 1))[0]
    ok, why = is_admissible(QuadraticPoly(1, 1, 2))
    assert not ok and "fixed" in why
    ok, why = is_admissible(QuadraticPoly(1, 0, -4))
    assert not ok and "reducible" in why
    assert not is_admissible(QuadraticPoly(-1, 0, 1))[0]
    assert not is_admissible(QuadraticPoly(3, 0, 3))[0]


def test_parse():
    assert QuadraticPoly.parse("1, 0,1") == QuadraticPoly(1, 0, 1)
    for bad in ("1,0", "1,x,1", ""):
        with pytest.raises(DomainError):
            QuadraticPoly.parse(bad)


def test_shift_examples():
    G = shift_to_G(QuadraticPoly(1, 0, 1))
    assert (G.s, G.t, G.A, G.B, G.C) == (16, 0, 256, 0, 1)
    G = shift_to_G(QuadraticPoly(2, 2, 1))
    assert (G.s, G.t, G.A, G.B, G.C) == (32, 0, 2048, 64, 1)
    with pytest.raises(DomainError):
        shift_to_G(QuadraticPoly(1, 1, 2))


@pytest.mark.parametrize("g", ADMISSIBLE)
def test_shift_properties(g):
    G = shift_to_G(g)
    assert all(G(n) == g(G.s * n + G.t) for n in range(11))
    assert discriminant(G.poly) == G.s**2 * g.delta
    for p in g.exceptional_primes():
        if p <= 100:
            assert localroots.rho_bruteforce(G, p) == 0


@given(st.integers(1, 20), st.integers(-20, 20), st.integers(-20, 20))
def test_closed_form_fixed_divisor_matches_scan(a, b, c):
    g = QuadraticPoly(a, b, c)
    ok, _ = is_admissible(g)
    square = discriminant(g) >= 0 and int(discriminant(g) ** 0.5 + 0.5) ** 2 == discriminant(g)
    fixed = any(all(g(n) % p == 0 for n in range(p)) for p in (2, 3, 5, 7, 11, 13, 17, 19))
    assert ok == (not square and not fixed)
