import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from p2lab import sievefn
from p2lab.errors import RangeError
from p2lab.polyform import QuadraticPoly

TWO_EC = sievefn.TWO_EC


@pytest.fixture(scope="module")
def grid():
    return sievefn.build_grid()


def test_examples():
    assert abs(sievefn.F_of(3.0) - 1.1873816) < 1e-7
    assert sievefn.F_of(3.0) == TWO_EC / 3
    assert sievefn.f_of(2.0) == 0.0
    assert abs(sievefn.f_of(4.0) - 0.97836) < 1e-5
    assert sievefn.f_of(4.0) == pytest.approx(math.exp(0.5772156649015329) * math.log(3) / 2, rel=1e-14)
    for bad in (0.0, -1.0, 8.5):
        with pytest.raises(RangeError):
            sievefn.F_of(bad)


def test_grid_vs_closed(grid):
    for s in np.arange(3.0, 5.0001, 0.0137):
        assert abs(grid.F(float(s)) - sievefn.F_closed(float(s))) < 1e-6
    for s in np.arange(2.0, 4.0001, 0.0137):
        assert abs(grid.f(float(s)) - sievefn.f_closed(float(s))) < 1e-6
    for s in (4.0, 4.5, 5.0, 5.5, 6.0):
        assert abs(grid.f(s) - sievefn.f_closed_4_6(s)) < 1e-6


def test_grid_vs_independent_ode_solver():
    # on (3, 5) the system decouples into ODEs driven by the closed forms
    sol = solve_ivp(lambda s, y: [sievefn.f_closed(s - 1) if s - 1 > 2 else 0.0],
                    (3.0, 5.0), [TWO_EC], rtol=1e-11, atol=1e-12, dense_output=True)
    for s in (3.5, 4.0, 4.7, 5.0):
        assert abs(sol.sol(s)[0] / s - sievefn.F_of(s)) < 1e-8


def test_residuals(grid):
    r = sievefn.dde_residual(grid)
    assert r.max <= 1e-5
    assert r.F_constant_segment == 0.0 and r.f_zero_segment == 0.0


def test_grid_invariants(grid):
    s, F, f = grid.s, grid.F_values, grid.f_values
    assert np.all(grid.sF[s <= 3.0] == TWO_EC)
    assert np.all(grid.sf[s <= 2.0] == 0.0)
    on = s >= 2.0
    assert np.all(np.diff(F[on]) <= 1e-15)
    assert np.all(np.diff(f[on]) >= -1e-15)
    both = s > 2.0
    assert np.all(f[both] < 1.0) and np.all(F[both] > 1.0)
    gap = (F - f)[s >= 3.0]
    assert np.all(np.diff(gap) <= 1e-15)


def test_knot_continuity():
    eps = 1e-10
    assert abs(sievefn.F_of(3 - eps) - sievefn.F_of(3 + eps)) <= 1e-8
    assert abs(sievefn.f_of(2 + eps)) <= 1e-8
    assert abs(sievefn.F_of(5.0) - sievefn.F_of(5.0 + eps)) <= 1e-8
    assert abs(sievefn.f_of(4.0) - sievefn.f_of(4.0 + eps)) <= 1e-8


def test_W_paper_value():
    wv = sievefn.W_constant(16 / 15, 1 / 5)
    assert abs(wv.ratio - 0.014057) <= 5e-6
    assert wv.W > TWO_EC * 0.2 / 154
    t = sievefn.W_from_integrals(16 / 15, 1 / 5)
    assert abs(t.ratio - wv.ratio) <= 1e-3


def test_W_empty_range():
    a, g = 1.2, 0.3  # alpha/gamma - 2 = 2
    wv = sievefn.W_constant(a, g)
    want = math.log(a - g) - (a - 1) / a * math.log(a - 1)
    assert wv.ratio == pytest.approx(want, rel=1e-15)


def test_W_domain():
    for a, g in ((0.4, 0.2), (1.0, 0.2), (1.1, 0.6), (1.2, 0.35)):
        with pytest.raises(RangeError):
            sievefn.W_constant(a, g)


def test_threshold():
    g = QuadraticPoly(1, 0, 1)
    assert abs(sievefn.theorem_threshold(g, 1e6) - 645.2) < 0.1
    gam = sievefn.theorem_threshold(g, math.e) / math.e * 77
    assert gam == pytest.approx(0.68641, abs=5e-5)
    xs = np.linspace(3, 1e5, 50)
    vals = [sievefn.theorem_threshold(g, float(x)) for x in xs]
    assert all(b > a for a, b in zip(vals, vals[1:]))
