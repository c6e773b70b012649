import dataclasses

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ternbound import interval as iv
from ternbound import major
from ternbound.interval import I

mpmath.mp.dps = 30


@pytest.fixture(scope="module")
def params():
    return major.MajorParams()


@pytest.fixture(scope="module")
def total(params):
    return major.nefumo_total(params)


def test_pinned_inputs_follow_from_their_derivations(params):
    out = major.check_pinned_inputs(params)
    assert set(out) >= {"ET_plus", "E_plus", "E_star", "err_star_T"}
    for name, (got, stated) in out.items():
        assert got.hi <= stated.hi, name


def test_tampered_pinned_input_is_refused(params):
    bad = dataclasses.replace(params, ET_plus=I("1.0e-8"))
    with pytest.raises(major.ContractError):
        major.check_pinned_inputs(bad)


def test_l2_major_window(total):
    L = total.L
    assert L.lo >= 8.70517 and L.hi <= 8.70531
    assert total.A_eta.hi <= 8.7806
    lp = total.parts["l2"]
    assert lp["K_r2/x"].hi <= 9.71e-21
    assert lp["err_ET"].hi <= 0.075272
    assert lp["err_E"].hi <= 1.0034e-8


def test_l2_major_J_is_A(params):
    l2 = major.l2_major(params)
    assert l2.J is l2.A
    assert l2.A.lo <= l2.L.lo and l2.L.hi <= l2.A.hi


def test_major_total_and_lines(total):
    assert total.total_coeff.lo >= 1.058259
    assert total.recompute_total().lo >= 1.058259
    c = total.parts
    assert c["eps_line"].hi <= 2.9387e-5
    assert c["second_line*kappa"].hi <= 1.7815e-6
    assert c["third_line/log^2"].hi <= 43
    assert c["error*kappa"].hi <= 3.8613e-5


def test_main_term_constant(total):
    ce = total.parts["C_eta_parts"]
    assert ce["c1"].lo >= 0.89762 and ce["c1"].hi <= 0.89763
    k3 = iv.pow_int(total.parts["kappa"], 3)
    assert (ce["moment_term"] * k3).hi <= 2.0002
    assert ce["kappa_slack"].hi <= 0.000834


def test_c1_closed_form():
    v = major.c1_optimal()
    ref = mpmath.mpf(9) / 4 / mpmath.sqrt(2 * mpmath.pi)
    assert mpmath.mpf(v.lo) <= ref <= mpmath.mpf(v.hi)


def test_auxiliary_bounds(total):
    aux = total.parts["aux"]
    lx = aux["log x"]
    assert (aux["LS_star"] / (lx * I("24.32") + I("0.57"))).hi <= 1
    assert (aux["LS_plus"] / (lx * I("18.57") + I("28.39"))).hi <= 1
    assert aux["Z_plus2/log x"].hi <= 0.640209
    assert aux["Z_star2/log x"].hi <= 0.0362
    assert (aux["eta_star_l2sq"] * total.parts["kappa"]).hi <= 1.77082


def test_singular_series_lower_bound_against_twin_prime_constant():
    c = major.C0_lower()
    assert c.lo >= 1.3203236
    assert mpmath.mpf(c.hi) >= 2 * mpmath.twinprime - mpmath.mpf("1e-12")
    assert mpmath.mpf(c.lo) <= 2 * mpmath.twinprime


def test_singular_series_even_is_zero():
    for N in (2, 4, 100, 2 * 3 * 5 * 7):
        assert major.C0_exact(N).hi == 0


def _direct_C0(N, cut=200_000):
    # plain product over sympy primes plus a tail: sum_{p > cut} 1/(p-1)^3 <= 1/(cut-1)^2
    ps = set(sympy.primefactors(N))
    v = mpmath.mpf(1)
    for p in sympy.primerange(2, cut):
        v *= (1 - mpmath.mpf(1) / (p - 1) ** 2) if p in ps else (1 + mpmath.mpf(1) / (p - 1) ** 3)
    for p in ps:
        if p >= cut:
            v *= 1 - mpmath.mpf(1) / (p - 1) ** 2
    return v, mpmath.mpf(1) / (cut - 1) ** 2


def test_singular_series_fifteen_direct_product():
    got = major.C0_exact(15)
    ref, tail = _direct_C0(15)
    assert mpmath.mpf(got.lo) <= ref * mpmath.exp(tail) and ref <= mpmath.mpf(got.hi)
    assert abs(got.mid() - 1.41597633521) < 1e-9


def test_singular_series_prime_list_route():
    assert major.C0_exact(3 * 5 * 7 * 11).contains(major.C0_exact([3, 5, 7, 11]))
    big = 1_000_003  # prime above the product cut
    a = major.C0_exact(big)
    ref, tail = _direct_C0(big, cut=1_100_000)
    assert mpmath.mpf(a.lo) <= ref * mpmath.exp(tail) and ref <= mpmath.mpf(a.hi)


def test_singular_series_dominates_lower_bound_on_odd_sample():
    rng = np.random.default_rng(99)
    low = major.C0_lower()
    for N in rng.integers(1, 10**12, 1000):
        N = int(N) | 1
        assert major.C0_exact(N).lo >= low.lo, N


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**15))
def test_singular_series_property(n):
    N = 2 * n + 1
    assert major.C0_exact(N).lo >= major.C0_lower().lo


def test_pinned_derivation_of_sum_error(params):
    out = major.pinned_derivations(params)
    got, stated = out["S_sum.err"]
    assert got.hi <= stated.hi
