import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ternbound import interval as iv
from ternbound import smoothing as sm
from ternbound.interval import Interval

mpmath.mp.dps = 30


def _eta_circ_mp(t):
    return t ** 3 * (2 - t) ** 3 * mpmath.exp(-(t - 1) ** 2 / 2)


def _phi_mp(t):
    return t ** 2 * mpmath.exp(-t ** 2 / 2)


def _eta2_mp(t):
    if 0.25 <= t <= 0.5:
        return 4 * mpmath.log(4 * t)
    if 0.5 <= t <= 1:
        return -4 * mpmath.log(t)
    return mpmath.mpf(0)


@pytest.fixture(scope="module")
def circ():
    return sm.norms(sm.ETA_CIRC)


def test_circ_l2_window(circ):
    assert circ.l2.lo >= 0.8001287 and circ.l2.hi <= 0.8001288
    oracle = mpmath.sqrt(mpmath.quad(lambda t: _eta_circ_mp(t) ** 2, [0, 1, 2]))
    assert mpmath.mpf(circ.l2.lo) <= oracle <= mpmath.mpf(circ.l2.hi)


def test_circ_derivative_l2_squared(circ):
    d = circ.l2_deriv
    assert d.width() < 1e-4
    # truncated value 2.7375292...: the enclosure meets [2.7375292, 2.7375293]
    assert d.hi >= 2.7375292 and d.lo <= 2.7375293
    oracle = mpmath.quad(lambda t: mpmath.diff(_eta_circ_mp, t) ** 2, [0, 1, 2])
    assert mpmath.mpf(d.lo) <= oracle <= mpmath.mpf(d.hi)


def test_circ_third_derivative_l1(circ):
    assert circ.l1_d3.hi <= 32.5023
    oracle = mpmath.quad(lambda t: abs(mpmath.diff(_eta_circ_mp, t, 3)),
                         np.linspace(0, 2, 41).tolist())
    assert mpmath.mpf(circ.l1_d3.lo) - 1e-6 <= oracle <= mpmath.mpf(circ.l1_d3.hi) + 1e-6


def test_circ_l1_and_sup(circ):
    l1 = mpmath.quad(_eta_circ_mp, [0, 1, 2])
    assert mpmath.mpf(circ.l1.lo) <= l1 <= mpmath.mpf(circ.l1.hi)
    assert circ.linf.contains(1.0)


def test_eta2_norms():
    n = sm.norms(sm.ETA2)
    assert n.l1.contains(1.0)
    l2sq = mpmath.quad(lambda t: _eta2_mp(t) ** 2, [0.25, 0.5, 1])
    assert mpmath.mpf(n.l2.lo) ** 2 <= l2sq <= mpmath.mpf(n.l2.hi) ** 2
    assert n.l2_deriv.contains(48.0)  # int_{1/4}^1 16/t^2 dt
    assert n.linf.contains(4 * math.log(2))


def test_phi_gauss_norms():
    n = sm.norms(sm.PHI_GAUSS)
    assert n.l1.contains(math.sqrt(math.pi / 2)) or (
        mpmath.mpf(n.l1.lo) <= mpmath.sqrt(mpmath.pi / 2) <= mpmath.mpf(n.l1.hi))
    l2sq = mpmath.quad(lambda t: _phi_mp(t) ** 2, [0, mpmath.inf])
    assert mpmath.mpf(n.l2.lo) ** 2 <= l2sq <= mpmath.mpf(n.l2.hi) ** 2
    assert n.linf.contains(2 / math.e)


@pytest.mark.parametrize("kappa", [1.0, 7.0, 49.0])
def test_eta_star_l1_scaling(kappa):
    n = sm.norms(sm.eta_star(kappa))
    target = mpmath.sqrt(mpmath.pi / 2) / kappa
    assert mpmath.mpf(n.l1.lo) <= target <= mpmath.mpf(n.l1.hi)
    assert n.l1.width() < 1e-8


def test_support_eta2_and_circ():
    ts = np.concatenate([np.linspace(0, 0.2499, 200), np.linspace(1.0001, 5, 200)])
    v = sm.eval(sm.ETA2, Interval(ts, ts))
    assert np.all(v.lo == 0) and np.all(v.hi == 0)
    ts = np.linspace(2.0001, 6, 300)
    v = sm.eval(sm.ETA_CIRC, Interval(ts, ts))
    assert np.all(v.lo == 0) and np.all(v.hi == 0)
    v = sm.eval(sm.ETA_CIRC, Interval(np.linspace(-3, -0.0001, 50)))
    assert np.all(v.hi == 0)


def test_circ_symmetry():
    u = np.linspace(0, 1, 1001)
    a = sm.eval(sm.ETA_CIRC, Interval(1 + u, 1 + u))
    b = sm.eval(sm.ETA_CIRC, Interval(1 - u, 1 - u))
    assert np.all((a - b).contains_zero())


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 3.0))
def test_pointwise_enclosures(t):
    for kind, f in ((sm.ETA_CIRC, _eta_circ_mp if t <= 2 else (lambda s: 0)),
                    (sm.PHI_GAUSS, _phi_mp), (sm.ETA2, _eta2_mp)):
        v = sm.eval(kind, Interval(t))
        assert mpmath.mpf(v.lo) <= f(mpmath.mpf(t)) <= mpmath.mpf(v.hi)


def test_eta2_and_deriv_pointwise():
    for t in (0.3, 0.4, 0.6, 0.9):
        d = sm.eta2_deriv(Interval(t))
        assert d.contains(4 / t if t < 0.5 else -4 / t)
    with pytest.raises(iv.DomainError):
        sm.eval(sm.ETA2, Interval(-1.0, 0.5))


def test_mellin_convolution_exchange():
    # S_{f, eta2 *_M phi}(x) against the w-integral of S_{f, eta2}(w x) phi(w)/w
    x = 10.0
    f = {n: (-1) ** n * (1 + (n % 7)) / 3 for n in range(1, 31)}
    direct = Interval(0.0)
    star = sm.eta_star(1.0)
    for n, c in f.items():
        direct = direct + sm.eval(star, Interval(n / x)) * c

    def integrand(w):
        s = sum(c * _eta2_mp(mpmath.mpf(n) / (w * x)) for n, c in f.items())
        return s * _phi_mp(w) / w

    brk = sorted({mpmath.mpf(n) / (x * b) for n in f for b in (0.25, 0.5, 1.0)})
    brk = [b for b in brk if b > 0] + [mpmath.mpf(20)]
    ref = mpmath.quad(integrand, [mpmath.mpf(0)] + brk)
    assert abs(ref - mpmath.mpf(direct.mid())) <= mpmath.mpf(direct.width()) + 1e-8


def test_eta_star_pointwise_against_mpmath():
    for u in (0.1, 0.5, 1.0, 2.0):
        v = sm.eval(sm.eta_star(1.0), Interval(u))
        ref = mpmath.quad(lambda t: _eta2_mp(t) * _phi_mp(u / t) / t, [0.25, 0.5, 1])
        assert mpmath.mpf(v.lo) - 1e-12 <= ref <= mpmath.mpf(v.hi) + 1e-12


@pytest.mark.parametrize("rho", np.round(np.linspace(0.1, 2.0, 20), 4).tolist())
def test_autocorrelation_membership(rho):
    r = sm.autocorr_check(float(rho))
    assert r.passed, r
    ref = mpmath.quad(lambda t: _eta_circ_mp(t) * _eta_circ_mp(2 - rho + t), [0, rho])
    assert mpmath.mpf(r.lhs.lo) - 1e-12 <= ref <= mpmath.mpf(r.lhs.hi) + 1e-12


def test_autocorrelation_domain():
    with pytest.raises(sm.ContractError):
        sm.autocorr_check(2.5)


def test_inner_product_degradation_random_pairs():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 1000:
        n = int(rng.integers(2, 12))
        v = rng.normal(size=n)
        w = v + rng.normal(size=n) * rng.uniform(0, 0.5) * np.linalg.norm(v) / math.sqrt(n)
        r = sm.cauchy_degrade_check(v, w)
        if r.status == "skipped":
            continue
        assert r.passed, (v, w)
        checked += 1


def test_inner_product_degradation_rejects_distant_pairs():
    assert sm.cauchy_degrade_check([1.0, 0.0], [0.0, 1.0]).status == "skipped"


def test_mellin_eta2_closed_form():
    # M eta2(s) = (2 (1 - 2^-s)/s)^2
    for s in (0.5 + 2j, 1 + 0j, 2 + 10j):
        m = sm.mellin("eta2", s)
        ref = mpmath.quad(lambda t: _eta2_mp(t) * t ** (s - 1), [0.25, 0.5, 1])
        assert abs(m.re.mid() - float(ref.real)) < 1e-12
        assert abs(m.im.mid() - float(ref.imag)) < 1e-12
    m4 = sm.mellin("eta4", 1.5 + 1j)
    m2 = sm.mellin("eta2", 1.5 + 1j)
    sq = m2 * m2
    assert abs(m4.re.mid() - sq.re.mid()) < 1e-12
    with pytest.raises(iv.DomainError):
        sm.mellin("eta2", 0)


def test_fourier_transform_and_decay():
    for t in (0.5, 3.0):
        ft = sm.fourier_transform_circ(t)
        mod = ft.abs()
        assert mod.hi <= sm.fourier_decay(sm.ETA_CIRC, 3, t).hi
        ref = mpmath.quad(lambda x: _eta_circ_mp(x) * mpmath.expj(-2 * mpmath.pi * x * t), [0, 1, 2])
        assert mpmath.mpf(ft.re.lo) - 1e-9 <= ref.real <= mpmath.mpf(ft.re.hi) + 1e-9
    with pytest.raises(sm.ContractError):
        sm.fourier_decay(sm.ETA_CIRC, 2, 1.0)


def test_eta_plus_norms_are_pinned():
    n = sm.norms(sm.eta_plus(200.0))
    assert set(n.provenance.values()) == {"pinned"}
    assert all(n.citations.values())
    with pytest.raises(sm.ContractError):
        sm.norms(sm.eta_plus(100.0))


def test_unknown_kind():
    with pytest.raises(ValueError):
        sm.SmoothingKind("nope")
    with pytest.raises(ValueError):
        sm.SmoothingKind("eta_star")
