"""Enclosure soundness of the interval layer.

Oracles: exact rationals for the field operations, mpmath at 60 digits for
the elementary functions.
"""
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ternbound import interval as iv
from ternbound.interval import DomainError, Interval, I, bisect_prove, enclose_max, integrate_enclose

mpmath.mp.dps = 60

N_FUZZ = 100_000


def _inside(box: Interval, exact) -> bool:
    lo, hi = float(box.lo), float(box.hi)
    return (lo == -math.inf or Fraction(lo) <= exact) and (hi == math.inf or exact <= Fraction(hi))


def _random_doubles(rng, n):
    mant = rng.uniform(-1, 1, n)
    expo = rng.integers(-30, 30, n)
    return np.ldexp(mant, expo)


@pytest.mark.parametrize("op", ["add", "sub", "mul", "div"])
def test_field_ops_contain_exact_result(op):
    rng = np.random.default_rng({"add": 1, "sub": 2, "mul": 3, "div": 4}[op])
    a = _random_doubles(rng, N_FUZZ)
    b = _random_doubles(rng, N_FUZZ)
    b[b == 0] = 1.0
    A, B = Interval(a.copy(), a.copy()), Interval(b.copy(), b.copy())
    res = {"add": A + B, "sub": A - B, "mul": A * B, "div": A / B}[op]
    lo, hi = res.lo, res.hi
    bad = 0
    for k in range(N_FUZZ):
        x, y = Fraction(float(a[k])), Fraction(float(b[k]))
        ex = {"add": x + y, "sub": x - y, "mul": x * y, "div": x / y}[op]
        if not Fraction(float(lo[k])) <= ex <= Fraction(float(hi[k])):
            bad += 1
    assert bad == 0


_ELEM = [
    ("exp", iv.exp, mpmath.exp, (-40.0, 40.0)),
    ("log", iv.log, mpmath.log, (1e-6, 1e6)),
    ("sqrt", iv.sqrt, mpmath.sqrt, (0.0, 1e6)),
    ("sin", iv.sin, mpmath.sin, (-100.0, 100.0)),
    ("cos", iv.cos, mpmath.cos, (-100.0, 100.0)),
    ("atan", iv.atan, mpmath.atan, (-50.0, 50.0)),
    ("log1p", iv.log1p, mpmath.log1p, (-0.9, 10.0)),
]


@pytest.mark.parametrize("name,f,oracle,dom", _ELEM, ids=[e[0] for e in _ELEM])
def test_elementary_points_contain_true_value(name, f, oracle, dom):
    rng = np.random.default_rng(len(name))
    xs = rng.uniform(*dom, 2000)
    for x in xs:
        r = f(Interval(float(x)))
        t = oracle(mpmath.mpf(float(x)))
        assert mpmath.mpf(r.lo) <= t <= mpmath.mpf(r.hi), (name, x)


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def interval_and_point(draw):
    a, b = sorted((draw(finite), draw(finite)))
    t = draw(st.floats(0, 1))
    p = a + (b - a) * t
    p = min(max(p, a), b)
    return Interval(a, b), p


@settings(max_examples=400, deadline=None)
@given(interval_and_point(), interval_and_point())
def test_interval_ops_contain_pointwise_results(xa, yb):
    (X, x), (Y, y) = xa, yb
    fx, fy = Fraction(x), Fraction(y)
    assert _inside(X + Y, fx + fy)
    assert _inside(X - Y, fx - fy)
    assert _inside(X * Y, fx * fy)
    if not Y.contains_zero():
        assert _inside(X / Y, fx / fy)
    assert _inside(X.sqr(), fx * fx)
    assert _inside(iv.pow_int(X, 3), fx ** 3)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 50), st.floats(0.0, 5.0), st.integers(1, 8))
def test_subdivision_hull_never_wider(a, w, k):
    # f(x) = x^2 - 3x + sin x evaluated on the whole box and on k pieces
    def f(x):
        return x.sqr() - x * 3.0 + iv.sin(x)
    X = Interval(a, a + w)
    whole = f(X)
    edges = np.linspace(a, a + w, k + 1)
    pieces = [f(Interval(float(edges[i]), float(edges[i + 1]))) for i in range(k)]
    pieces[-1] = f(Interval(float(edges[-2]), a + w))
    hull = Interval.hull_of(*pieces)
    assert hull.lo >= whole.lo and hull.hi <= whole.hi


def test_decimal_constants_enclose_true_values():
    assert mpmath.mpf(iv.PI.lo) <= mpmath.pi <= mpmath.mpf(iv.PI.hi)
    assert mpmath.mpf(iv.E.lo) <= mpmath.e <= mpmath.mpf(iv.E.hi)
    assert mpmath.mpf(iv.EULER_GAMMA.lo) <= mpmath.euler <= mpmath.mpf(iv.EULER_GAMMA.hi)
    # 0.1 is not a double; its enclosure must straddle it
    d = I("0.1")
    assert d.lo < d.hi and _inside(d, Fraction(1, 10))


def test_domain_errors():
    with pytest.raises(DomainError):
        iv.log(Interval(-1.0, 2.0))
    with pytest.raises(DomainError):
        iv.sqrt(Interval(-2.0, -1.0))
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)


def test_division_by_zero_straddle_is_unbounded_or_raises():
    try:
        r = Interval(1.0) / Interval(-1.0, 1.0)
    except (ZeroDivisionError, DomainError):
        return
    assert math.isinf(r.lo) and math.isinf(r.hi)


# bisection soundness: 20 true and 20 false statements ------------------

def _le(f, g):
    return lambda b: f(b).certainly_le(g(b))


def _lt(f, g):
    return lambda b: f(b).certainly_lt(g(b))


def _c(v):
    return lambda b: Interval.coerce(v)


def _x(b):
    return b


TRUE_CASES = [
    ("sin <= 1.001", _le(iv.sin, _c(1.001)), Interval(-10.0, 10.0)),
    ("x^2 - x + 0.3 > 0", lambda b: (b.sqr() - b + 0.3).certainly_pos(), Interval(-3.0, 3.0)),
    ("log x < x", _lt(iv.log, _x), Interval(0.05, 20.0)),
    ("exp x > x + 0.9", lambda b: iv.exp(b).certainly_gt(b + 0.9), Interval(-5.0, 5.0)),
    ("sqrt x <= (x + 1)/2 + 0.01", lambda b: iv.sqrt(b).certainly_le((b + 1.0) * 0.5 + 0.01), Interval(0.0, 9.0)),
    ("cos x >= 1 - x^2/2 - 0.01", lambda b: iv.cos(b).certainly_ge(1.0 - b.sqr() * 0.5 - 0.01), Interval(-2.0, 2.0)),
    ("atan x < 1.571", _lt(iv.atan, _c(1.571)), Interval(-100.0, 100.0)),
    ("x^3 - 2x + 2 > 0 on [-1, 3]", lambda b: (iv.pow_int(b, 3) - b * 2.0 + 2.0).certainly_pos(), Interval(-1.0, 3.0)),
    ("log1p x <= x + 1e-3", lambda b: iv.log1p(b).certainly_le(b + 1e-3), Interval(-0.5, 5.0)),
    ("x e^-x < 0.37", lambda b: (b * iv.exp(-b)).certainly_lt(I("0.37")), Interval(0.0, 10.0)),
    ("sin^2 + cos^2 <= 1.01", lambda b: (iv.sin(b).sqr() + iv.cos(b).sqr()).certainly_le(I("1.01")), Interval(-4.0, 4.0)),
    ("|sin x| <= |x| + 1e-3", lambda b: abs(iv.sin(b)).certainly_le(abs(b) + 1e-3), Interval(-3.0, 3.0)),
    ("2D: x^2 + y^2 + 0.1 > x y", lambda b: (b[0].sqr() + b[1].sqr() + 0.1).certainly_gt(b[0] * b[1]),
     (Interval(-2.0, 2.0), Interval(-2.0, 2.0))),
    ("2D: exp(x + y) > 0", lambda b: iv.exp(b[0] + b[1]).certainly_pos(), (Interval(-3.0, 3.0), Interval(-3.0, 3.0))),
    ("log x <= sqrt x", lambda b: iv.log(b).certainly_le(iv.sqrt(b)), Interval(0.5, 100.0)),
    ("x^4 + 1 > 2x^2 - 0.01 fails only at +-1", lambda b: (iv.pow_int(b, 4) + 1.0).certainly_gt(b.sqr() * 2.0 - 0.01), Interval(-2.0, 2.0)),
    ("cos x < 1.0001", _lt(iv.cos, _c(1.0001)), Interval(-7.0, 7.0)),
    ("exp(-x^2) <= 1.0001", lambda b: iv.exp(-b.sqr()).certainly_le(I("1.0001")), Interval(-3.0, 3.0)),
    ("x / (1 + x^2) <= 0.5001", lambda b: (b / (b.sqr() + 1.0)).certainly_le(I("0.5001")), Interval(0.0, 10.0)),
    ("sqrt(x + 1) > sqrt x", lambda b: iv.sqrt(b + 1.0).certainly_gt(iv.sqrt(b)), Interval(0.0, 50.0)),
]

FALSE_CASES = [
    ("sin <= 0.999", _le(iv.sin, _c(0.999)), Interval(-10.0, 10.0)),
    ("x^2 >= x", lambda b: (b.sqr()).certainly_ge(b), Interval(0.0, 2.0)),
    ("exp x > 1 + x", lambda b: iv.exp(b).certainly_gt(b + 1.0), Interval(-1.0, 1.0)),
    ("x^2 > 0", lambda b: b.sqr().certainly_pos(), Interval(-1.0, 1.0)),
    ("log x < x - 1", _lt(iv.log, lambda b: b - 1.0), Interval(0.5, 2.0)),
    ("cos x > 0", lambda b: iv.cos(b).certainly_pos(), Interval(0.0, 2.0)),
    ("x^3 - x > 0", lambda b: (iv.pow_int(b, 3) - b).certainly_pos(), Interval(0.5, 2.0)),
    ("sqrt x < x", lambda b: iv.sqrt(b).certainly_lt(b), Interval(0.5, 4.0)),
    ("atan x < 0.785", _lt(iv.atan, _c(0.785)), Interval(0.0, 2.0)),
    ("x e^-x < 0.3678", lambda b: (b * iv.exp(-b)).certainly_lt(I("0.3678")), Interval(0.0, 10.0)),
    ("sin^2 + cos^2 < 1", lambda b: (iv.sin(b).sqr() + iv.cos(b).sqr()).certainly_lt(1.0), Interval(-1.0, 1.0)),
    ("2D: x^2 + y^2 > x y", lambda b: (b[0].sqr() + b[1].sqr()).certainly_gt(b[0] * b[1]),
     (Interval(-1.0, 1.0), Interval(-1.0, 1.0))),
    ("2D: x + y < 1.999", lambda b: (b[0] + b[1]).certainly_lt(I("1.999")), (Interval(0.0, 1.0), Interval(0.0, 1.0))),
    ("log x <= 0", lambda b: iv.log(b).certainly_le(0.0), Interval(0.5, 1.001)),
    ("x^4 + 1 > 2x^2", lambda b: (iv.pow_int(b, 4) + 1.0).certainly_gt(b.sqr() * 2.0), Interval(-2.0, 2.0)),
    ("cos x < 1", _lt(iv.cos, _c(1.0)), Interval(-7.0, 7.0)),
    ("x / (1 + x^2) < 0.5", lambda b: (b / (b.sqr() + 1.0)).certainly_lt(0.5), Interval(0.0, 10.0)),
    ("sin x >= x - x^3/6 + 1e-9", lambda b: iv.sin(b).certainly_ge(b - iv.pow_int(b, 3) / 6.0 + 1e-9), Interval(0.0, 1.0)),
    ("exp(-x^2) < 1", lambda b: iv.exp(-b.sqr()).certainly_lt(1.0), Interval(-3.0, 3.0)),
    ("1/x > 0.1", lambda b: (1.0 / b).certainly_gt(0.1), Interval(1.0, 10.0)),
]


@pytest.mark.parametrize("label,pred,dom", TRUE_CASES, ids=[c[0] for c in TRUE_CASES])
def test_bisect_proves_true_statements(label, pred, dom):
    out = bisect_prove(pred, dom, max_depth=40)
    assert out.proven, out


@pytest.mark.parametrize("label,pred,dom", FALSE_CASES, ids=[c[0] for c in FALSE_CASES])
def test_bisect_never_certifies_false_statements(label, pred, dom):
    out = bisect_prove(pred, dom, max_depth=30, max_boxes=200_000)
    assert not out.proven
    assert out.failure_box is not None


# quadrature against closed forms --------------------------------------

QUAD = [
    ("x^2 on [0,1]", lambda x: x.sqr(), lambda x: x * 2.0, 0.0, 1.0, mpmath.mpf(1) / 3),
    ("exp on [0,1]", iv.exp, iv.exp, 0.0, 1.0, mpmath.e - 1),
    ("sin on [0,pi]", iv.sin, iv.cos, 0.0, math.pi, 1 - mpmath.cos(mpmath.mpf(math.pi))),
    ("1/x on [1,2]", lambda x: 1.0 / x, lambda x: -1.0 / x.sqr(), 1.0, 2.0, mpmath.log(2)),
    ("x^3 on [-1,2]", lambda x: iv.pow_int(x, 3), lambda x: x.sqr() * 3.0, -1.0, 2.0, mpmath.mpf(15) / 4),
    ("exp(-x^2) on [0,1]", lambda x: iv.exp(-x.sqr()), lambda x: x * iv.exp(-x.sqr()) * -2.0, 0.0, 1.0,
     mpmath.sqrt(mpmath.pi) / 2 * mpmath.erf(1)),
    ("sqrt on [0,4]", iv.sqrt, None, 0.0, 4.0, mpmath.mpf(16) / 3),
    ("1/(1+x^2) on [0,1]", lambda x: 1.0 / (x.sqr() + 1.0), lambda x: x * -2.0 / (x.sqr() + 1.0).sqr(), 0.0, 1.0,
     mpmath.pi / 4),
    ("log on [1,3]", iv.log, lambda x: 1.0 / x, 1.0, 3.0, 3 * mpmath.log(3) - 2),
    ("x cos x on [0,2]", lambda x: x * iv.cos(x), lambda x: iv.cos(x) - x * iv.sin(x), 0.0, 2.0,
     2 * mpmath.sin(2) + mpmath.cos(2) - 1),
]


@pytest.mark.parametrize("label,f,df,a,b,exact", QUAD, ids=[q[0] for q in QUAD])
def test_integrate_encloses_closed_forms(label, f, df, a, b, exact):
    r = integrate_enclose(f, a, b, tol=1e-7, df=df, max_panels=2**20)
    assert mpmath.mpf(r.value.lo) <= exact <= mpmath.mpf(r.value.hi)
    assert r.value.width() < 1e-3


def test_integrate_with_tail():
    # int_0^inf e^-x dx = 1, tail from 20 is e^-20
    tail = (20.0, iv.exp(Interval(-20.0)))
    r = integrate_enclose(lambda x: iv.exp(-x), 0.0, math.inf, df=lambda x: -iv.exp(-x), tail=tail)
    assert r.value.contains(1.0)
    with pytest.raises(ValueError):
        integrate_enclose(iv.exp, 0.0, math.inf)


def test_enclose_max_contains_true_sup():
    # sup of x e^-x on [0, 5] is 1/e at x = 1
    m = enclose_max(lambda x: x * iv.exp(-x), Interval(0.0, 5.0), tol=1e-9,
                    df=lambda x: (1.0 - x) * iv.exp(-x))
    assert mpmath.mpf(m.lo) <= 1 / mpmath.e <= mpmath.mpf(m.hi)
    assert m.width() < 1e-8


def test_bisect_outcome_records_depth_and_boxes():
    out = bisect_prove(lambda b: b.certainly_lt(2.0), Interval(0.0, 1.0), max_depth=3)
    assert out.proven and out.max_depth_used == 0 and out.boxes == 1
    out = bisect_prove(lambda b: iv.sin(b).certainly_le(I("0.999")), Interval(0.0, 3.0), max_depth=12)
    assert out.status == "unproven" and out.max_depth_used == 12
    assert out.failure_box.contains(math.pi / 2) or out.failure_box.hi <= math.pi
