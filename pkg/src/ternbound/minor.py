"""Minor-arc bounds: the l-infinity bound functions and the total Z.

Most quantities depend on y = x / kappa only through log y, so the
internal evaluators take ``ly = log y`` as an Interval.  That keeps very
large y (up to 10^150 and beyond) inside double range and lets the
bisection certificates work on boxes of log y.

The chain evaluated by ``ostop_total``:

    Z <= (sqrt(|phi|_1 (M + T)) + sqrt(S_eta*(0, x) E / x^2 * kappa))^2 * x^2 / kappa

with M built from g(r0), g(r1) and the integral of g(r)/r over [r0, r1].
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import interval as iv
from .interval import Interval, ProofOutcome, I
from .pinned import pinned
from .sieve import digamma_F

C_PLUS = I("2.3912")
C_MINUS = I("0.6294")
C_GAMMA = I("1.025742")  # digamma_F(r) - e^gamma log log r, for r >= 10^5
SMALL_N_COEF = I("0.7131")  # non-prime prime powers
SQRT_X_PSI = I("0.51942")  # (1/2) * 1.03883, from psi(t) < 1.03883 t
S2_TRIVIAL = I("1.04488")  # S_eta2(0, x) <= 1.04488 x
X_PLUS = 4.9e26


class ContractError(ValueError):
    pass


@dataclass(frozen=True)
class MinorParams:
    """x is read as its shortest decimal form, so 4.9e26 means exactly 49 * 10^25."""
    x: float = X_PLUS
    kappa: float = 49.0
    r0: int = 150_000
    delta0: float = 8.0

    def __post_init__(self):
        if not Fraction(repr(float(self.x))) >= Fraction(10) ** 25 * Fraction(repr(float(self.kappa))):
            raise ContractError("need x >= 10^25 kappa")
        if self.kappa < 1:
            raise ContractError("need kappa >= 1")
        if not (100_000 <= self.r0 <= self.r1.lo):
            raise ContractError("need 10^5 <= r0 <= r1")

    @property
    def x_iv(self) -> Interval:
        return I(repr(float(self.x)))

    @property
    def log_x(self) -> Interval:
        return iv.log(self.x_iv)

    @property
    def log_y(self) -> Interval:
        return self.log_x - iv.log(I(repr(float(self.kappa))))

    @property
    def K(self) -> Interval:
        return self.log_y * 0.5

    @property
    def r1(self) -> Interval:
        return r1_of(self.log_y)


def r1_of(ly: Interval) -> Interval:
    return I("0.375") * iv.exp(ly * (I(4) / 15))


# R_{x,t} and L_t ------------------------------------------------------------

_LOG9_OVER = iv.log(I(9) / I("2.004"))


def R_log(lz, t) -> Interval:
    """R_{z,t} with the first argument given as log z."""
    lz, t = Interval.coerce(lz), Interval.coerce(t)
    d = _LOG9_OVER + lz / 3.0 - iv.log(t)
    if not d.lo > 0:
        raise iv.DomainError("need t below 9 z^(1/3) / 2.004")
    return I("0.27125") * iv.log1p(iv.log(t * 4.0) / (d * 2.0)) + I("0.41415")


def R_xt(x, t) -> Interval:
    return R_log(iv.log(Interval.coerce(x)), t)


def L_t(t, F: Optional[Interval] = None) -> Interval:
    t = Interval.coerce(t)
    F = digamma_F(t) if F is None else Interval.coerce(F)
    lt = iv.log(t)
    a = iv.LOG2 * (I(7) / 4) + lt * (I(13) / 4)
    b = iv.LOG2 * (I(16) / 9) + lt * (I(80) / 9)
    return F * (a + I(80) / 9) + b + I(111) / 5


# g_x, h and their convolved versions -------------------------------------

def _g_core(Rmix: Interval, r: Interval, extra: Interval) -> Interval:
    F = digamma_F(r)
    two_r = r * 2.0
    main = ((Rmix * iv.log(two_r) + 0.5) * iv.sqrt(F) + 2.5) / iv.sqrt(two_r)
    return main + L_t(r, F) / r + extra


def g_plain_log(lx, r) -> Interval:
    lx, r = Interval.coerce(lx), Interval.coerce(r)
    return _g_core(R_log(lx, r * 2.0), r, I("3.2") * iv.exp(-lx / 6.0))


def g_plain(x, r) -> Interval:
    """g_x(r): the l-infinity bound for S_eta2 at q <= x^(1/3)/6."""
    return g_plain_log(iv.log(Interval.coerce(x)), r)


def h_log(lx) -> Interval:
    lx = Interval.coerce(lx)
    return (I("0.2727") * iv.exp(-lx / 6.0) * iv.pow_real(lx, I(3) / 2)
            + I(1218) * iv.exp(-lx / 3.0) * lx)


def h_fn(x) -> Interval:
    """h(x) = 0.2727 x^(-1/6) (log x)^(3/2) + 1218 x^(-1/3) log x."""
    return h_log(iv.log(Interval.coerce(x)))


@lru_cache(maxsize=None)
def C_phi2() -> Interval:
    """Enclosure of -int_0^1 w^2 e^(-w^2/2) log w dw; bounds C_{phi,2,K} for every K."""
    eps = 1e-4

    def f(w):
        return -(w.sqr() * iv.exp(-w.sqr() * 0.5) * iv.log(w))

    def df(w):
        e = iv.exp(-w.sqr() * 0.5)
        return -((w * 2.0 - iv.pow_int(w, 3)) * e * iv.log(w) + w * e)

    body = iv.integrate_enclose(f, eps, 1.0, tol=1e-11, df=df, panels=2**12).value
    # integrand is in [0, w^2 |log w|] near 0
    head = I(eps) ** 3 * (-iv.log(I(eps)) / 3.0 + I(1) / 9)
    return body + Interval(0.0, head.hi)


def c_phi_log(ly) -> Interval:
    """(C_{phi,2,K}/|phi|_1)/log K with K = log(y)/2, upper-end only."""
    ly = Interval.coerce(ly)
    c = C_phi2().hi / iv.SQRT_HALF_PI.lo
    up = Interval(c) / iv.log(ly * 0.5)
    return Interval(0.0, up.hi)


def C_phi3(K) -> Interval:
    """Upper bound (1.04488/|phi|_1) (1/K)^3/3 for the small-w mass of phi."""
    K = Interval.coerce(K)
    b = S2_TRIVIAL / iv.SQRT_HALF_PI * iv.pow_int(K.recip(), 3) / 3.0
    return Interval(0.0, b.hi)


def _Rmix(ly: Interval, t: Interval, cphi: Interval) -> Interval:
    Ry = R_log(ly, t)
    RyK = R_log(ly - iv.log(ly * 0.5), t)
    # R_{y/K} >= R_y, so the upper end of c_phi gives the upper bound
    return Ry + (RyK - Ry) * Interval(cphi.hi)


def g_conv_log(ly, r) -> Interval:
    ly, r = Interval.coerce(ly), Interval.coerce(r)
    Rm = _Rmix(ly, r * 2.0, c_phi_log(ly))
    K = ly * 0.5
    return _g_core(Rm, r, I("3.2") * iv.exp((iv.log(K) - ly) / 6.0))


def g_conv(params: MinorParams, r) -> Interval:
    """g_{y,phi}(r) with y = x/kappa and K = log(y)/2."""
    return g_conv_log(params.log_y, r)


def h_phi(params: MinorParams) -> Interval:
    """Large-q bound h(y/K) + C_{phi,3}(K)."""
    ly = params.log_y
    return h_log(ly - iv.log(params.K)) + C_phi3(params.K)


def g_r1_coefficient_log(ly) -> Interval:
    """g(r1) divided by log y sqrt(log log y) / y^(2/15)."""
    ly = Interval.coerce(ly)
    scale = ly * iv.sqrt(iv.log(ly)) * iv.exp(-ly * (I(2) / 15))
    return g_conv_log(ly, r1_of(ly)) / scale


# certificates -----------------------------------------------------------

_GOLROF_B = iv.log(I(12) * iv.cbrt(I(2)) / I("2.004")) * 2.0
_GOLROF_C = _GOLROF_B * 2.0 - iv.log(I(3))


def golrof_f(t) -> Interval:
    t = Interval.coerce(t)
    lt = iv.log(t)
    return (lt * (I(4) / 3) - _GOLROF_C) / (t * (I(2) / 15) - lt * (I(2) / 3) + _GOLROF_B)


def golrof_upper(t: Interval) -> float:
    """Upper end of f on a box with t >= 5, where numerator and denominator both increase."""
    if not t.lo >= 5.0:
        raise iv.DomainError("need t >= 5")
    a, b = Interval(float(t.lo)), Interval(float(t.hi))
    num = iv.log(b) * (I(4) / 3) - _GOLROF_C
    if num.hi <= 0:
        return 0.0
    den = a * (I(2) / 15) - iv.log(a) * (I(2) / 3) + _GOLROF_B
    mono = float((Interval(num.hi) / den).hi)
    # mean-value form, much sharper near the maximum
    m = Interval(float(t.mid()))
    lt = iv.log(t)
    N = lt * (I(4) / 3) - _GOLROF_C
    D = t * (I(2) / 15) - lt * (I(2) / 3) + _GOLROF_B
    dN = (I(4) / 3) / t
    dD = I(2) / 15 - (I(2) / 3) / t
    mv = golrof_f(m) + (dN * D - N * dD) / D.sqr() * (t - m)
    return min(mono, float(mv.hi))


def _q_point(v: float) -> Interval:
    if v < 1e-3:
        # a - a^2/2 <= log1p(a) <= a for a >= 0
        return Interval(1.0, (1.0 - Interval(v) * 0.5).recip().hi)
    a = Interval(v)
    return a / iv.log1p(a)


def _a_over_log1p(a: Interval) -> Interval:
    # a / log1p(a) is increasing on a >= 0
    if a.lo < 0:
        raise iv.DomainError("need a >= 0")
    return Interval(_q_point(float(a.lo)).lo, _q_point(float(a.hi)).hi)


def hut_lhs(r: Interval, s: Interval) -> Interval:
    """Derivative condition for the monotonicity of g in r.

    With l = log(9 x^(1/3) / (4.008 r)) >= log(54/4.008) and a = log(8r)/(2l),
    the logarithmic derivative test reads lhs < 1.  ``s`` in [0, 1]
    parametrizes a over its whole range (0, log(8r)/(2 l_min)].
    """
    A = iv.log(r * 8.0)
    a = _nonneg(s * A / (iv.log(I(54) / I("4.008")) * 2.0))  # s, A >= 0
    term = (2.0 / A) * (1.0 + a * 2.0) / (1.0 + a) * _a_over_log1p(a)
    return term + (iv.log(r) * iv.log_log(r)).recip()


def I0_log(r0, ly, lz) -> Interval:
    """I_{0,r0,r1,z} with r1 = (3/8) y^(4/15); y and z given by their logs."""
    r0 = Interval.coerce(r0)
    r1 = r1_of(Interval.coerce(ly))
    a0, a1 = iv.log(r0 * 2.0), iv.log(r1 * 2.0)
    s0, s1 = iv.sqrt(r0), iv.sqrt(r1)
    R0 = R_log(lz, r0 * 2.0).sqr()
    R1 = R_log(lz, r1 * 2.0).sqr()
    first = R0 * (P2(a0) / s0 - P2(a1) / s1)
    second = (R1 - R0) / iv.log(r1 / r0) * (P2m(a0) / s0 - (P3(a1) - a0 * P2(a1)) / s1)
    return first + second


def hasmo_lhs(r0, ly) -> Interval:
    """(1 - c_phi) sqrt(I0(y)) + c_phi sqrt(I0(2y/log y)), c_phi at its upper end."""
    ly = Interval.coerce(ly)
    c = Interval(c_phi_log(ly).hi)
    a = iv.sqrt(_nonneg(I0_log(r0, ly, ly)))
    b = iv.sqrt(_nonneg(I0_log(r0, ly, ly - iv.log(ly * 0.5))))
    return a + (b - a) * c


def _nonneg(x: Interval) -> Interval:
    return Interval(max(float(x.lo), 0.0), max(float(x.hi), 0.0))


R_Y_2R1_SUP = I("0.27125") * iv.log(I(3)) + I("0.41415")
GOLROF_BOUND = I("0.019562618")
R_YK_2R1_SUP = I("0.27125") * iv.log(I(3) + GOLROF_BOUND) + I("0.41415")


def hasmo_tail(r0: float = 150_000, ly_min: float = 150 * math.log(10)) -> Interval:
    """Crude bound of the hasmo quantity for all y >= e^ly_min.

    Negative terms of I0 are dropped and R_{z,2 r1} is replaced by its
    supremum over y, so a single evaluation on [ly_min, inf) suffices.
    """
    r0 = Interval(float(r0))
    ly = Interval(ly_min, math.inf)
    a0 = iv.log(r0 * 2.0)
    s0 = iv.sqrt(r0)
    lr = ly * (I(4) / 15) + iv.log(I("0.375")) - iv.log(r0)
    low = I("0.41415").sqr()

    def crude(lz, Rsup):
        R0 = R_log(lz, r0 * 2.0).sqr()
        return R0 * P2(a0) / s0 + (Rsup.sqr() - low) / lr * P2m(a0) / s0

    c = Interval(c_phi_log(Interval(ly_min)).hi)
    a = iv.sqrt(crude(ly, R_Y_2R1_SUP))
    # z = 2y/log y ranges over [e^ly_min / (ly_min/2), inf) as well
    lz = Interval(float((Interval(ly_min) - iv.log(Interval(ly_min) * 0.5)).lo), math.inf)
    b = iv.sqrt(crude(lz, R_YK_2R1_SUP))
    return Interval(0.0, (a + (b - a) * c).hi)


def convog_second_derivative(u: Interval, r: Interval) -> Interval:
    """d^2/dt^2 log(1 + log(4r) / (2 (t/3 - log(2.004 r/9)))) times 9, with u = t/3 - log(2.004r/9)."""
    c = iv.log(r * 4.0) * 0.5
    return c * (u * 2.0 + c) / (u.sqr() * (u + c).sqr())


def _log_box(lo: float, hi: float) -> Interval:
    return Interval(math.log(lo), math.log(hi))


def monotonicity_certs(params: Optional[MinorParams] = None, depth: int = 40) -> list:
    """Bisection certificates for the monotonicity and window claims.

    Every outcome is returned; unproven ones are kept so callers can report them.
    """
    p = params or MinorParams()
    r0 = Interval(float(p.r0))
    out = []
    out.append(iv.bisect_prove(lambda t: golrof_upper(t) <= GOLROF_BOUND.lo,
                               Interval(180.0, 30000.0), depth, label="golrof"))
    out.append(iv.bisect_prove(lambda b: hut_lhs(iv.exp(b[0]), b[1]).hi < 1.0,
                               (_log_box(175.0, 1e6), Interval(0.0, 1.0)), depth,
                               label="vinc_derivative"))
    ly_win = Interval(25 * math.log(10), 150 * math.log(10))
    out.append(iv.bisect_prove(lambda b: hasmo_lhs(r0, b).hi <= 0.4153461,
                               ly_win, depth, initial_splits=6, label="hasmo"))
    # beyond the window the crude closed form must stay under the same bound
    out.append(ProofOutcome("proven" if hasmo_tail(p.r0).hi <= 0.4153461 else "unproven",
                            0, None, 1, "hasmo_tail"))
    out.append(iv.bisect_prove(
        lambda lx: h_log(lx).lo >= g_plain_log(lx, iv.exp(lx / 3.0) / 6.0).hi,
        Interval(math.log(5832.0), 34.0), depth, initial_splits=4, label="convet_crossover"))
    lx_win = Interval(25 * math.log(10), 150 * math.log(10))

    def gosia(lx):
        r = r1_of(lx)
        gm = ((R_log(lx, r * 2.0) * iv.log(r * 2.0) + 0.5) * iv.sqrt(digamma_F(r)) + 2.5) \
            / iv.sqrt(r * 2.0)
        l2x = lx + iv.log(I(2)) - iv.log(lx)
        return gm.lo >= h_log(l2x).hi
    out.append(iv.bisect_prove(gosia, lx_win, depth, label="gosia"))
    u_min = float(iv.log(I(54) / I("2.004")).lo)
    out.append(iv.bisect_prove(lambda b: convog_second_derivative(b[0], iv.exp(b[1])).lo > 0,
                               (Interval(u_min, 1e4), _log_box(3.0, 1e9)), depth,
                               label="convog"))
    out.append(iv.bisect_prove(lambda b: g_conv_log(b, r0).hi <= 0.041014, ly_win, depth,
                               label="g_r0_window"))
    out.append(iv.bisect_prove(lambda b: f2_log(r0, b).hi <= 0.001332, ly_win, depth,
                               label="f2_window"))
    out.append(iv.bisect_prove(lambda b: g_r1_coefficient_log(b).hi <= 0.30782, ly_win, depth,
                               label="g_r1_window"))
    return out


def g_conv_grid_check(params: Optional[MinorParams] = None, n: int = 60) -> list:
    """Pairwise comparisons g(r_i) >= g(r_{i+1}) on a log grid of [175, r1]."""
    p = params or MinorParams()
    rs = np.geomspace(175.0, float(p.r1.lo), n)
    vals = [g_conv(p, Interval(float(r))) for r in rs]
    res = []
    for i in range(n - 1):
        a, b = vals[i], vals[i + 1]
        if a.lo >= b.hi:
            res.append("proven")
        elif a.hi < b.lo:
            res.append("violated")
        else:
            res.append("unproven")
    return res


# closed-form integrals ---------------------------------------------------

def P2(t):
    return t.sqr() + t * 4.0 + 8.0


def P3(t):
    return iv.pow_int(t, 3) + t.sqr() * 6.0 + t * 24.0 + 48.0


def P2m(t):
    return t.sqr() * 2.0 + t * 16.0 + 48.0


def F_log(t) -> Interval:
    """F(t) = e^gamma log t + c_gamma."""
    return iv.E_GAMMA * iv.log(Interval.coerce(t)) + C_GAMMA


def J_r(r) -> Interval:
    lr = iv.log(Interval.coerce(r))
    return F_log(lr) + iv.E_GAMMA / lr


def I1_r(r) -> Interval:
    lr = iv.log(Interval.coerce(r))
    return F_log(lr) + iv.E_GAMMA * 2.0 / lr


def closed_integrals(r0, r1, zs: Optional[dict] = None) -> dict:
    """Closed forms of the integral toolkit, keyed by a short description.

    ``zs`` maps names to log z values; each adds an ``I0[name]`` entry
    (with r1 then taken as (3/8) y^(4/15) from the ``y`` entry).
    """
    r0, r1 = Interval.coerce(r0), Interval.coerce(r1)
    if not r0.lo >= 1e5:
        raise ContractError("need r0 >= 10^5")
    lr0 = iv.log(r0)
    s0 = iv.sqrt(r0)
    l2r0 = iv.log(r0 * 2.0)
    Fl = F_log(lr0)
    eg = iv.E_GAMMA
    out = {
        "r^-3/2": 2.0 / s0,
        "log r / r^2": (lr0 + 1.0) / r0,
        "r^-2": r0.recip(),
        "1/r on [r0,r1]": iv.log(r1 / r0),
        "log r / r^3/2": (lr0 + 2.0) * 2.0 / s0,
        "log 2r / r^3/2": (l2r0 + 2.0) * 2.0 / s0,
        "log^2 2r / r^3/2": P2(l2r0) * 2.0 / s0,
        "log^3 2r / r^3/2": P3(l2r0) * 2.0 / s0,
        "E1(log r0)": Interval(((lr0 + 1.0) * r0).recip().lo, (lr0 * r0).recip().hi),
        "sqrt(digamma)/r^3/2": iv.sqrt(Fl) * 2.0 / s0 * (1.0 + eg / (Fl * lr0)),
        "digamma/r^2": (eg * (iv.log(lr0) + lr0.recip()) + C_GAMMA) / r0,
        "digamma log r/r^2": (eg * (iv.log(lr0) + lr0.recip()) + C_GAMMA) / r0 * (lr0 + 1.0),
        "digamma/r^3/2": 2.0 / s0 * (Fl + eg * 2.0 / lr0),
        "J_r0": J_r(r0),
        "I1_r0": I1_r(r0),
    }
    if zs:
        ly = zs["y"]
        for name, lz in zs.items():
            out[f"I0[{name}]"] = I0_log(r0, ly, lz)
    return out


def f1_minor(r0) -> Interval:
    r0 = Interval.coerce(r0)
    lr0 = iv.log(r0)
    Fl = F_log(lr0)
    s2 = iv.sqrt(r0 * 2.0)
    a = iv.sqrt(Fl) / s2 * (1.0 + iv.E_GAMMA / (Fl * lr0)) + 5.0 / s2
    ler = lr0 + 1.0
    b = ((ler * (I(13) / 4) + I("10.102")) * J_r(r0) + ler * (I(80) / 9) + I("23.433")) / r0
    return a + b


def f2_log(r0, ly) -> Interval:
    ly = Interval.coerce(ly)
    K = ly * 0.5
    return I("3.2") * iv.exp((iv.log(K) - ly) / 6.0) * iv.log(r1_of(ly) / Interval.coerce(r0))


def f0_log(r0, ly) -> Interval:
    r0 = Interval.coerce(r0)
    return hasmo_lhs(r0, ly) * iv.sqrt(2.0 / iv.sqrt(r0) * I1_r(r0))


def minor_integral(params: Optional[MinorParams] = None) -> dict:
    """Bound for int_{r0}^{r1} g(r)/r dr as f0 + f1 + f2."""
    p = params or MinorParams()
    r0 = Interval(float(p.r0))
    f0 = f0_log(r0, p.log_y)
    f1 = f1_minor(r0)
    f2 = f2_log(r0, p.log_y)
    return {"f0": f0, "f1": f1, "f2": f2, "total": f0 + f1 + f2}


# combining l2 and l-infinity bounds --------------------------------------

@dataclass(frozen=True)
class PiecewiseH:
    """Nondecreasing H on [r0, r1) with H(r1) = 1; ``value`` is the left branch."""
    value: Callable[[Interval], Interval]


@dataclass(frozen=True)
class Nonincreasing:
    value: Callable[[Interval], Interval]


def palan_combine(H: PiecewiseH, g: Nonincreasing, I0, r0: int, r1: int,
                  panels: int = 4096) -> Interval:
    """Upper bound g(r0)(H(r0) - I0) + int g dH, including the jump of H at r1.

    For nonincreasing g and nondecreasing H the integral over a panel
    [a, b] is at most g(a) (H(b) - H(a)), so a geometric grid gives a sound
    upper sum.  The final jump 1 - H(r1-) is weighted by g(r1).
    """
    if not (isinstance(r0, int) and isinstance(r1, int)) or not 0 < r0 <= r1:
        raise ContractError("need integers 0 < r0 <= r1")
    I0 = Interval.coerce(I0)
    edges = np.unique(np.concatenate(([float(r0)], np.geomspace(r0, r1, panels + 1)[1:-1],
                                      [float(r1)]))) if r1 > r0 else np.array([float(r0)])
    Hv = [H.value(Interval(float(e))) for e in edges]
    gv = [g.value(Interval(float(e))) for e in edges]
    for a, b in zip(Hv[:-1], Hv[1:]):
        if not b.hi >= a.lo:
            raise ContractError("H is not nondecreasing")
    for a, b in zip(gv[:-1], gv[1:]):
        if not a.hi >= b.lo:
            raise ContractError("g is not nonincreasing")
    if Hv[-1].hi > 1.0 or Hv[0].lo < 0.0:
        raise ContractError("H must lie in [0, 1]")
    total = Interval(gv[0].hi) * (Hv[0] - I0)
    for i in range(len(edges) - 1):
        total = total + Interval(gv[i].hi) * _nonneg(Hv[i + 1] - Hv[i])
    total = total + Interval(gv[-1].hi) * _nonneg(1.0 - Hv[-1])
    return Interval(total.hi)


def ostop_H(params: MinorParams) -> PiecewiseH:
    den = params.log_x * 0.5 + C_MINUS
    return PiecewiseH(lambda r: (iv.log(r + 1.0) + C_PLUS) / den)


def jump_bound(params: MinorParams) -> Interval:
    """7/15 + (-2.14938 + (8/15) log kappa)/(log x + 2 c^-), bounding 1 - H(r1-)."""
    lk = iv.log(Interval(float(params.kappa)))
    return I(7) / 15 + (I("-2.14938") + lk * (I(8) / 15)) / (params.log_x + C_MINUS * 2.0)


# the minor-arc total ------------------------------------------------------

@dataclass
class MinorBound:
    """Each field is a coefficient: E, S, T, J, M per x and Z per x^2/kappa."""
    E: Interval
    S: Interval
    T: Interval
    J: Interval
    M: Interval
    Z: Interval
    parts: dict = field(default_factory=dict)

    def z_recomputed(self) -> Interval:
        c = self.parts
        return (iv.sqrt(iv.SQRT_HALF_PI * (self.M + self.T)) + iv.sqrt(c["S_star_E"])).sqr()


def eta_plus_constants(linf: Interval, linf_t: Interval) -> dict:
    """C_{eta+,0}, C_{eta+,1}, C_{eta+,2} from sup bounds min(linf, linf_t / t)."""
    a, b = linf.sqr(), linf_t.sqr()
    C0 = SMALL_N_COEF * (a * 2.0 + b * (I(2) / 3))
    C1 = SMALL_N_COEF * b * (I(4) / 9)
    C2 = SQRT_X_PSI * a
    return {"C_eta+,0": C0, "C_eta+,1": C1, "C_eta+,2": C2}


def S_bound(params: MinorParams) -> Interval:
    """Coefficient of x in sum Lambda(n) log(n) eta_+(n/x)^2 (an upper bound for S)."""
    lx = params.log_x
    err = pinned("S_sum.err") + pinned("S_sum.err_sqrt") / iv.sqrt(params.x_iv)
    return (pinned("S_sum.main") + iv.pm(err)) * lx - pinned("S_sum.linear")


def ostop_total(params: Optional[MinorParams] = None, J: Optional[Interval] = None,
                norms=None, S_star: Optional[Interval] = None) -> MinorBound:
    """Evaluate the minor-arc total at a given x.

    ``J`` is the major-arc l2 coefficient (J/x); by default it comes from
    the major module.  ``norms`` supplies |eta_+|_inf and |t eta_+|_inf.
    ``S_star`` is S_eta*(0, x) kappa / x.
    """
    p = params or MinorParams()
    if J is None:
        from .major import l2_major
        J = l2_major().J
    if norms is None:
        from .smoothing import norms as _norms, eta_plus
        norms = _norms(eta_plus(200.0))
    if S_star is None:
        S_star = iv.SQRT_HALF_PI + iv.pm(pinned("eta_star.ET0"))
    lx = p.log_x
    x = p.x_iv
    cs = eta_plus_constants(norms.get("linf"), norms.get("linf_t"))
    C0, C1, C2 = cs["C_eta+,0"], cs["C_eta+,1"], cs["C_eta+,2"]
    E = _nonneg(((C0 + C2) * lx + (C0 * 2.0 + C1)) / iv.sqrt(x))
    S = Interval(S_bound(p).hi)
    sJE = iv.sqrt(J) - iv.sqrt(E)
    if not sJE.lo > 0:
        raise ContractError("need J > E")
    JE = Interval(sJE.lo).sqr()
    JE = Interval(JE.lo)
    C3 = C_phi3(p.K)
    T = Interval((C3 * (S - JE)).hi)
    r0 = Interval(float(p.r0))
    g0 = g_conv(p, r0)
    g1 = g_conv(p, p.r1)
    mi = minor_integral(p)
    den = lx + C_MINUS * 2.0
    bracket = (iv.log(r0 + 1.0) + C_PLUS) / (lx * 0.5 + C_MINUS) * S - JE
    roussel = Interval(g0.hi) * bracket
    jump = jump_bound(p)
    comrade = jump * Interval(g1.hi) * S
    casbah = S * 2.0 / den * Interval(mi["total"].hi)
    M = Interval((roussel + comrade + casbah).hi)
    SE = S_star * E
    Z = (iv.sqrt(iv.SQRT_HALF_PI * (M + T)) + iv.sqrt(Interval(SE.hi))).sqr()
    parts = dict(cs, **{
        "g(r0)": g0, "g(r1)": g1, "g(r1) coefficient": g_r1_coefficient_log(p.log_y),
        "f0": mi["f0"], "f1": mi["f1"], "f2": mi["f2"], "integral g/r": mi["total"],
        "C_phi,2": C_phi2(), "c_phi": c_phi_log(p.log_y), "C_phi,3": C3,
        "(sqrt J - sqrt E)^2": JE, "bracket": bracket, "roussel": roussel,
        "comrade": comrade, "casbah": casbah, "jump": jump, "S_star": S_star,
        "S_star_E": Interval(SE.hi), "R_y,2r0": R_log(p.log_y, r0 * 2.0),
        "R_y/K,2r0": R_log(p.log_y - iv.log(p.K), r0 * 2.0),
        "R_y,2r1": R_log(p.log_y, p.r1 * 2.0),
        "R_y/K,2r1": R_log(p.log_y - iv.log(p.K), p.r1 * 2.0),
        "L_r0": L_t(r0), "digamma(r0)": digamma_F(r0), "I1_r0": I1_r(r0),
    })
    return MinorBound(E=E, S=S, T=T, J=J, M=M, Z=Z, parts=parts)
