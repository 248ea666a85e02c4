import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from p2lab import analytic, localroots, ntcore
from p2lab.errors import DomainError, RangeError
from p2lab.polyform import QuadraticPoly

P256 = QuadraticPoly(256, 0, 1)


def brute_kloosterman(h, s, r1, r2, lam, Lam):
    tot = 0j
    for r in range(r1 + 1, r2):
        if (r - lam) % Lam or math.gcd(r, s) != 1:
            continue
        rbar = pow(r, -1, s) if s > 1 else 0
        tot += cmath.exp(2j * math.pi * h * rbar / s)
    return tot


def test_gauss_pairs_examples():
    pairs = analytic.gauss_pairs(5)
    assert {(p.r, p.s) for p in pairs} == {(1, 2), (-1, 2)}
    assert analytic.gauss_pairs(3) == []
    assert [(p.r, p.s) for p in analytic.gauss_pairs(1)] == [(0, 1)]
    with pytest.raises(DomainError):
        analytic.gauss_pairs(4)


def test_gauss_pairs_exhaustive():
    for D in range(1, 3000, 2):
        want = {(r, s) for s in range(1, math.isqrt(D) + 1) for r in range(-s + 1, s)
                if r * r + s * s == D and math.gcd(r, s) == 1}
        assert {(p.r, p.s) for p in analytic.gauss_pairs(D)} == want


def test_omega_examples():
    assert analytic.omega_from_pair(analytic.GaussPair(1, 2)) == 2
    assert analytic.omega_from_pair(analytic.GaussPair(3, 4)) == 18
    assert analytic.omega_from_pair(analytic.GaussPair(0, 1)) == 0
    assert sorted(analytic.omega_from_pair(p) for p in analytic.gauss_pairs(25)) == [7, 18]


def test_correspondence():
    rep = analytic.correspondence_check(20_000)
    assert rep.ok
    # D with a prime factor 3 mod 4: both sides empty
    for D in (3, 21, 77, 3 * 25):
        assert analytic.gauss_pairs(D) == [] and localroots.rho(QuadraticPoly(1, 0, 1), D) == 0
    with pytest.raises(RangeError):
        analytic.correspondence_check(10**6 + 1)


def test_kloosterman_examples():
    assert abs(analytic.incomplete_kloosterman(1, 7, 0, 8) - (-1)) < 1e-12
    for s in (1, 6, 7, 12, 30):
        assert abs(analytic.complete_kloosterman([s], s)[0] - ntcore.euler_phi(s)) < 1e-12
    with pytest.raises(DomainError):
        analytic.incomplete_kloosterman(1, 7, 0, 15)
    with pytest.raises(DomainError):
        analytic.incomplete_kloosterman(1, 7, 3, 3)


@settings(max_examples=150, deadline=None)
@given(st.integers(-50, 50), st.integers(1, 200), st.integers(-300, 300), st.data())
def test_kloosterman_brute(h, s, r1, data):
    r2 = r1 + data.draw(st.integers(1, 2 * s - 1)) if s > 1 else r1 + 1
    Lam = data.draw(st.integers(1, 3 * s + 2))
    lam = data.draw(st.integers(0, Lam - 1))
    if s == 1 and r2 - r1 >= 2:
        return
    got = analytic.incomplete_kloosterman(h, s, r1, r2, lam, Lam)
    want = brute_kloosterman(h, s, r1, r2, lam, Lam)
    terms = sum(1 for r in range(r1 + 1, r2) if (r - lam) % Lam == 0 and math.gcd(r, s) == 1)
    assert abs(got - want) <= 1e-9 * max(terms, 1)
    assert abs(got) <= terms + 1e-9


def test_ramanujan_closed_form():
    hs = list(range(1, 21))
    for s in range(1, 501):
        vals = analytic.complete_kloosterman(hs, s)
        assert np.abs(vals - [analytic.ramanujan(s, h) for h in hs]).max() < 1e-9


def test_hooley_scan():
    a = analytic.hooley_ratio_scan(40, 4, samples=3, seed=7)
    b = analytic.hooley_ratio_scan(40, 4, samples=3, seed=7)
    assert a == b
    assert all(r.max_ratio >= 0 for r in a)
    assert all(abs(r.complete_sum - r.ramanujan) < 1e-9 for r in a)
    with pytest.raises(RangeError):
        analytic.hooley_ratio_scan(5001, 1)


def test_smoothing():
    sa = analytic.smooth_build(0.2, 0.7, 0.05, 1000)
    assert sa.A0 == pytest.approx(0.5) and sa.B0 == 0.05
    rep = analytic.smooth_verify(sa, 10_000)
    assert rep.ok and rep.coeffs_ok
    t = np.linspace(0.2 + 0.05, 0.7 - 0.05, 101)
    A = sa.evaluate(t, "A")
    B = sa.evaluate(t, "B")
    tail = analytic.tail_bound(sa.H, sa.C)
    assert np.all(np.abs(1 - A) <= B + tail)
    assert np.all(B <= tail)  # B vanishes away from the endpoints
    for args in ((0.2, 0.25, 0.05, 10), (0.0, 0.95, 0.05, 10), (0.2, 0.7, 0.05, 0)):
        with pytest.raises(DomainError):
            analytic.smooth_build(*args)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 0.4), st.floats(0.15, 0.55), st.floats(0.01, 0.07), st.integers(50, 400))
def test_smoothing_property(alpha, length, C, H):
    if not 2 * C < length < 1 - 2 * C or alpha + length >= 1:
        return
    sa = analytic.smooth_build(alpha, alpha + length, C, H)
    assert analytic.smooth_verify(sa, 2000).ok


def test_tail_bound_matches_direct_sum():
    C, H = 0.05, 1000
    h = np.arange(H + 1, 2_000_000, dtype=np.float64)
    direct = 4 * math.fsum(analytic.C_h(h, C).tolist())
    assert analytic.tail_bound(H, C) == pytest.approx(direct, rel=1e-4)


def test_equidist_examples():
    r = analytic.equidist_count(P256, 1, 1, 0, 0, 0.0, 1.0, 10**5, 2 * 10**5)
    want = int(localroots.rho_table(P256, 2 * 10**5)[10**5 + 1:2 * 10**5].sum())
    assert r.count == want and r.rel_dev <= 0.05
    r = analytic.equidist_count(P256, 1, 1, 0, 0, 0.3, 0.3, 1000, 2000)
    assert r.count == 0 and r.main_term == 0
    r = analytic.equidist_count(P256, 3, 1, 0, 0, 0.0, 1.0, 1000, 2000)
    assert r.count == 0 and r.main_term == 0


def test_equidist_preconditions():
    bad = [dict(q=4, d=1), dict(q=6, d=2), dict(q=5, d=5, mu=5), dict(q=5, d=5, mu=1, omega=1),
           dict(q=5, d=3)]
    for kw in bad:
        args = dict(q=1, d=1, mu=0, omega=0) | kw
        with pytest.raises(DomainError):
            analytic.equidist_count(P256, args["q"], args["d"], args["mu"], args["omega"], 0.0, 1.0, 100, 200)
    with pytest.raises(DomainError):
        analytic.equidist_count(P256, 1, 1, 0, 0, 0.0, 1.0, 100, 201)


def test_equidist_general_case_matches_enumeration():
    q, d, mu, om = 5, 5, 2, 2
    M, M1, a, b = 50, 90, 0.1, 0.8
    got = analytic.equidist_count(P256, q, d, mu, om, a, b, M, M1).count
    want = sum(1 for m in range(M + 1, M1) if math.gcd(m, q) == 1 and (m - mu) % d == 0
               for W in range(math.ceil(a * m * q), math.ceil(b * m * q))
               if P256(W) % (m * q) == 0 and (W - om) % d == 0)
    assert got == want


def test_window_additivity():
    args = (P256, 5, 5, 1, 2)
    lo = analytic.equidist_count(*args, 0.1, 0.35, 300, 550).count
    hi = analytic.equidist_count(*args, 0.35, 0.9, 300, 550).count
    both = analytic.equidist_count(*args, 0.1, 0.9, 300, 550).count
    assert lo + hi == both


def test_equidist_decreasing_deviation():
    a = analytic.equidist_count(P256, 1, 1, 0, 0, 0.0, 1.0, 10**3, 2 * 10**3).rel_dev
    b = analytic.equidist_count(P256, 1, 1, 0, 0, 0.0, 1.0, 10**6, 2 * 10**6).rel_dev
    assert b < a


def test_equidist_main_term_density():
    # the count follows phi(q)/q; the A(q) form is smaller by that factor again
    r = analytic.equidist_count(P256, 5, 1, 0, 0, 0.0, 1.0, 4000, 8000)
    assert abs(r.count - r.main_term_derived) / r.main_term_derived < 0.02
    assert r.main_term == pytest.approx(r.main_term_derived * 4 / 5)
