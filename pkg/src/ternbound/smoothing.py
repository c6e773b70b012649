"""Smoothing functions, their norms, Mellin transforms and decay facts.

The smooth compactly supported weights (eta_circ, h, phi) are products
of an exact rational polynomial and the exponential of an exact
quadratic.  ``PolyExp`` keeps them in that form so derivatives, products
and reflections stay exact, and interval evaluation only happens at the
very end.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import interval as iv
from .interval import DomainError, Interval, I, integrate_enclose, enclose_max


class ContractError(ValueError):
    pass


# exact polynomial times exp(quadratic) --------------------------------------

def _poly_trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(Fraction(x) for x in c)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_add(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _poly_trim([x + y for x, y in zip(a, b)])


def _poly_deriv(a):
    if len(a) == 1:
        return (Fraction(0),)
    return _poly_trim([k * a[k] for k in range(1, len(a))])


def _poly_compose_affine(a, c0, c1):
    # a(c0 + c1 t)
    out = (Fraction(0),)
    base = (Fraction(1),)
    lin = (Fraction(c0), Fraction(c1))
    for coef in a:
        out = _poly_add(out, tuple(coef * x for x in base))
        base = _poly_mul(base, lin)
    return out


def _horner(coeffs, t: Interval) -> Interval:
    acc = Interval(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * t + Interval(c)
    return acc


@dataclass(frozen=True)
class PolyExp:
    """P(t) * exp(Q(t)) with P a rational polynomial and Q a rational quadratic."""

    poly: tuple
    quad: tuple = (Fraction(0), Fraction(0), Fraction(0))

    @classmethod
    def make(cls, poly, quad=(0, 0, 0)) -> "PolyExp":
        q = _poly_trim(quad) + (Fraction(0),) * 3
        return cls(_poly_trim(poly), q[:3])

    def __mul__(self, other) -> "PolyExp":
        if isinstance(other, (int, Fraction)):
            return PolyExp(_poly_trim([other * c for c in self.poly]), self.quad)
        return PolyExp(_poly_mul(self.poly, other.poly),
                       tuple(x + y for x, y in zip(self.quad, other.quad)))

    __rmul__ = __mul__

    def __add__(self, other) -> "PolyExp":
        if self.quad != other.quad:
            raise ValueError("sum needs a common exponent")
        return PolyExp(_poly_add(self.poly, other.poly), self.quad)

    def deriv(self) -> "PolyExp":
        dq = _poly_deriv(self.quad)
        return PolyExp(_poly_add(_poly_deriv(self.poly), _poly_mul(self.poly, dq)), self.quad)

    def compose_affine(self, c0, c1) -> "PolyExp":
        """t -> f(c0 + c1 t)."""
        q = _poly_compose_affine(self.quad, c0, c1) + (Fraction(0),) * 3
        return PolyExp(_poly_compose_affine(self.poly, c0, c1), q[:3])

    def __call__(self, t) -> Interval:
        t = Interval.coerce(t)
        q = self.quad
        expo = Interval(q[0]) + t * (Interval(q[1]) + t * Interval(q[2]))
        return _horner(self.poly, t) * iv.exp(expo)

    def floats(self, t: np.ndarray) -> np.ndarray:
        """Plain float evaluation, for oracles and plotting only."""
        p = np.polynomial.polynomial.polyval(t, [float(c) for c in self.poly])
        q = [float(c) for c in self.quad]
        return p * np.exp(q[0] + q[1] * t + q[2] * t * t)


def polyexp_integral(f: PolyExp, a: float, b: float, tol: float = 1e-10,
                     panels: int = 2**14, max_panels: int = 2**20) -> Interval:
    d2 = f.deriv().deriv()
    return integrate_enclose(f, a, b, tol=tol, d2f=d2, panels=panels,
                             max_panels=max_panels).value


def polyexp_max(f: PolyExp, a: float, b: float, tol: float = 1e-12) -> Interval:
    return enclose_max(f, Interval(a, b), tol=tol, df=f.deriv())


def polyexp_variation(f: PolyExp, a: float, b: float, panels: int = 2**16) -> Interval:
    """Total variation of f on [a, b], i.e. the L1 norm of f'.

    On runs of panels where f' has a certified sign f is monotone, so the
    run contributes |f(end) - f(start)|; elsewhere a panel contributes at
    most its width times |f'|.
    """
    g = f.deriv()
    edges = np.linspace(a, b, panels + 1)
    box = Interval(edges[:-1], edges[1:])
    gb = g(box)
    sign = np.where(gb.lo > 0, 1, np.where(gb.hi < 0, -1, 0))
    parts = []
    h = Interval(edges[1:]) - Interval(edges[:-1])
    unsure = sign == 0
    if unsure.any():
        parts.append(Interval(0.0, iv.isum(h[unsure] * Interval(gb.mag()[unsure])).hi))
    i = 0
    n = len(sign)
    while i < n:
        if sign[i] == 0:
            i += 1
            continue
        j = i
        while j + 1 < n and sign[j + 1] == sign[i]:
            j += 1
        parts.append(abs(f(Interval(edges[j + 1])) - f(Interval(edges[i]))))
        i = j + 1
    total = Interval(0.0)
    for p in parts:
        total = total + p
    return total


# Gaussian tails -----------------------------------------------------------

def gauss_monomial_tail(k: int, c, y: float) -> Interval:
    """Upper bound for the integral of t^k exp(-c t^2) over [y, inf).

    With u = t^2 the integrand is u^a e^{-cu}/2, a = (k-1)/2, which is at most
    X^a e^{-cX} e^{-(c - a/X)(u - X)} for u >= X = y^2 once c > a/X.
    For k = 0 use e^{-ct^2} <= (t/y) e^{-ct^2}.
    """
    c = Interval.coerce(c)
    Y = Interval(float(y))
    X = Y.sqr()
    if k == 0:
        return Interval(0.0, (iv.exp(-c * X) / (c * Y * 2.0)).hi)
    a = (k - 1) / 2.0
    slope = c - Interval(a) / X
    if not slope.certainly_pos():
        raise ContractError("tail cut too small for this monomial")
    val = iv.pow_real(X, a) * iv.exp(-c * X) / slope * 0.5 if a else iv.exp(-c * X) / slope * 0.5
    return Interval(0.0, val.hi)


def phi_tail_majorant(y: float) -> Interval:
    """(y + 2/y) e^{-y^2/2} bounds the integral of t^2 e^{-t^2/2} over [y, inf)."""
    Y = Interval(float(y))
    return Interval(0.0, ((Y + 2.0 / Y) * iv.exp(-Y.sqr() * 0.5)).hi)


def polyexp_tail(f: PolyExp, y: float) -> Interval:
    """Bound for the integral of |f| over [y, inf) when Q is a pure -c t^2."""
    q0, q1, q2 = f.quad
    if q1 != 0 or q2 >= 0:
        raise ContractError("tail bound needs exp(q0 - c t^2)")
    c = Interval(-q2)
    tot = Interval(0.0)
    for k, coef in enumerate(f.poly):
        if coef:
            tot = tot + Interval(abs(coef)) * gauss_monomial_tail(k, c, y)
    return Interval(0.0, (tot * iv.exp(Interval(q0))).hi)


# the named functions --------------------------------------------------------

F = Fraction
# t^3 (2-t)^3
_CUBE = _poly_mul(_poly_mul((F(0), F(0), F(0), F(1)), (F(1),)),
                  _poly_compose_affine((F(0), F(0), F(0), F(1)), 2, -1))
ETA_CIRC_PE = PolyExp.make(_CUBE, (F(-1, 2), F(1), F(-1, 2)))
H_POLY_PE = PolyExp.make(_CUBE, (F(-1, 2), F(1), F(0)))
# the variant with t^2 in front, used inside the band-limited eta_plus
_SQCUBE = _poly_mul((F(0), F(0), F(1)), _poly_compose_affine((F(0), F(0), F(0), F(1)), 2, -1))
H2_POLY_PE = PolyExp.make(_SQCUBE, (F(-1, 2), F(1), F(0)))
PHI_PE = PolyExp.make((F(0), F(0), F(1)), (F(0), F(0), F(-1, 2)))

KINDS = ("eta1", "eta2", "eta_circ", "h_poly", "phi_gauss", "eta_star", "eta_plus")


@dataclass(frozen=True)
class SmoothingKind:
    tag: str
    param: Optional[float] = None

    def __post_init__(self):
        if self.tag not in KINDS:
            raise ValueError(f"unknown smoothing {self.tag!r}")
        if self.tag in ("eta_star", "eta_plus") and self.param is None:
            raise ValueError(f"{self.tag} needs a parameter")

    def __str__(self):
        return self.tag if self.param is None else f"{self.tag}({self.param:g})"


ETA1 = SmoothingKind("eta1")
ETA2 = SmoothingKind("eta2")
ETA_CIRC = SmoothingKind("eta_circ")
H_POLY = SmoothingKind("h_poly")
PHI_GAUSS = SmoothingKind("phi_gauss")


def eta_star(kappa: float = 49.0) -> SmoothingKind:
    return SmoothingKind("eta_star", float(kappa))


def eta_plus(H: float = 200.0) -> SmoothingKind:
    return SmoothingKind("eta_plus", float(H))


def _piecewise(t: Interval, pieces: Sequence[tuple[float, float, Callable]],
               zero_outside: tuple[float, float]) -> Interval:
    """Hull of the piece images over the parts of t they meet, plus 0 off support."""
    lo = np.full(np.shape(t.lo), np.inf)
    hi = np.full(np.shape(t.lo), -np.inf)
    for a, b, fn in pieces:
        clo, chi = np.maximum(t.lo, a), np.minimum(t.hi, b)
        ok = clo <= chi
        if not np.any(ok):
            continue
        v = fn(Interval(np.where(ok, clo, a), np.where(ok, chi, a)))
        lo = np.where(ok, np.minimum(lo, v.lo), lo)
        hi = np.where(ok, np.maximum(hi, v.hi), hi)
    s0, s1 = zero_outside
    off = (t.lo < s0) | (t.hi > s1)
    lo = np.where(off, np.minimum(lo, 0.0), lo)
    hi = np.where(off, np.maximum(hi, 0.0), hi)
    if np.ndim(lo) == 0:
        return Interval(float(lo), float(hi))
    return Interval(lo, hi)


def _eta2_left(t):
    return iv.log(t * 4.0) * 4.0


def _eta2_right(t):
    return -iv.log(t) * 4.0


def eta2_eval(t) -> Interval:
    t = Interval.coerce(t)
    return _piecewise(t, [(0.25, 0.5, _eta2_left), (0.5, 1.0, _eta2_right)], (0.25, 1.0))


def eta2_deriv(t) -> Interval:
    """Derivative of eta2 away from its kinks (4/t left of 1/2, -4/t right)."""
    t = Interval.coerce(t)
    return _piecewise(t, [(0.25, 0.5, lambda s: 4.0 / s), (0.5, 1.0, lambda s: -4.0 / s)],
                      (0.25, 1.0))


def eta1_eval(t) -> Interval:
    t = Interval.coerce(t)
    return _piecewise(t, [(0.5, 1.0, lambda s: Interval(2.0) + 0.0 * s)], (0.5, 1.0))


def _mellin_conv_star(u: Interval, panels: int = 2**12) -> Interval:
    """(eta2 *_M phi)(u) = int eta2(t) phi(u/t) dt/t over t in [1/4, 1]."""
    def part(fn, dfn):
        def g(t):
            w = u / t
            return fn(t) * PHI_PE(w) / t

        def dg(t):
            w = u / t
            # d/dt [e(t) phi(u/t) / t]
            return (dfn(t) * PHI_PE(w) - fn(t) * PHI_DERIV(w) * w / t - fn(t) * PHI_PE(w) / t) / t
        return g, dg

    g1, dg1 = part(_eta2_left, lambda s: 4.0 / s)
    g2, dg2 = part(_eta2_right, lambda s: -4.0 / s)
    tol = 1e-10
    a = integrate_enclose(g1, 0.25, 0.5, tol=tol, df=dg1, panels=panels, max_panels=panels * 16).value
    b = integrate_enclose(g2, 0.5, 1.0, tol=tol, df=dg2, panels=panels, max_panels=panels * 16).value
    return a + b


PHI_DERIV = PHI_PE.deriv()


def _h_H(t: Interval, H: float, panels: int = 2**20, u_max: float = 6.0) -> Interval:
    """Band-limited h_H(t) = int h(t e^{-u}) sin(H u)/(pi u) du, truncated to |u| <= u_max."""
    Hs = float(H)
    inv_pi = iv.PI.recip()

    def sinc(x: Interval) -> Interval:
        small = x.mag() < 0.5
        x2 = x.sqr()
        series = Interval(1.0) - x2 / 6.0 + Interval(0.0, 1.0) * x2.sqr() / 120.0
        safe = Interval(np.where(small, 1.0, x.lo), np.where(small, 1.0, x.hi)) \
            if x.is_array else (Interval(1.0) if small else x)
        direct = iv.sin(safe) / safe
        if x.is_array:
            return Interval(np.where(small, series.lo, direct.lo), np.where(small, series.hi, direct.hi))
        return series if small else direct

    def dsinc(x: Interval) -> Interval:
        small = x.mag() < 0.5
        series = -x / 3.0 + Interval(-1.0, 1.0) * iv.pow_int(abs(x), 3) / 30.0
        safe = Interval(np.where(small, 1.0, x.lo), np.where(small, 1.0, x.hi)) \
            if x.is_array else (Interval(1.0) if small else x)
        direct = (safe * iv.cos(safe) - iv.sin(safe)) / safe.sqr()
        if x.is_array:
            return Interval(np.where(small, series.lo, direct.lo), np.where(small, series.hi, direct.hi))
        return series if small else direct

    hd = H2_POLY_PE.deriv()

    def hh(s: Interval) -> Interval:
        return _piecewise(s, [(0.0, 2.0, H2_POLY_PE)], (0.0, 2.0))

    def dhh(s: Interval) -> Interval:
        return _piecewise(s, [(0.0, 2.0, hd)], (0.0, 2.0))

    def g(u):
        s = t * iv.exp(-u)
        return hh(s) * sinc(u * Hs) * (inv_pi * Hs)

    def dg(u):
        s = t * iv.exp(-u)
        return (-s * dhh(s) * sinc(u * Hs) + hh(s) * dsinc(u * Hs) * Hs) * (inv_pi * Hs)

    inv_u = Interval(1.0) / (iv.PI * u_max)
    lo_u = -u_max
    if t.lo > 0 and math.log(t.lo / 2.0) > -u_max:
        lo_u = math.nextafter(math.log(t.lo / 2.0), -math.inf)
    main = integrate_enclose(g, lo_u, u_max, tol=0.0, df=dg, panels=panels,
                             max_panels=panels).value
    # u > u_max: h(s) <= 8 e^{3/2} s^2 with s = t e^{-u}, and |sin(Hu)/(pi u)| <= 1/(pi u_max)
    tail = Interval(8.0) * iv.exp(Interval(1.5)) * t.sqr() * iv.exp(Interval(-2.0 * u_max)) \
        * 0.5 * inv_u
    if lo_u == -u_max and (t.lo <= 0 or math.log(t.lo / 2.0) < -u_max):
        # u < -u_max: the integral of h(t e^{-u}) du is at most that of h(s)/s ds
        tail = tail + h2_over_s_integral() * inv_u
    return main + Interval(-tail.hi, tail.hi)


@functools.lru_cache(maxsize=None)
def h2_over_s_integral() -> Interval:
    return polyexp_integral(PolyExp(_SQCUBE[1:], H2_POLY_PE.quad), 0.0, 2.0)


def _nonneg(x: Interval) -> Interval:
    return Interval(np.maximum(x.lo, 0.0), np.maximum(x.hi, 0.0)) if x.is_array else \
        Interval(max(x.lo, 0.0), max(x.hi, 0.0))


def eval(kind: SmoothingKind, t) -> Interval:
    """Pointwise enclosure of the smoothing function on t (scalar or array interval)."""
    t = Interval.coerce(t)
    tag = kind.tag
    if tag in ("eta1", "eta2", "h_poly", "phi_gauss") and np.any(t.lo < 0):
        raise DomainError(f"{tag} is defined on [0, inf)")
    if tag == "eta1":
        return eta1_eval(t)
    if tag == "eta2":
        return eta2_eval(t)
    # these three are nonnegative, so the enclosure may be clipped at 0
    if tag == "eta_circ":
        return _nonneg(_piecewise(t, [(0.0, 2.0, ETA_CIRC_PE)], (0.0, 2.0)))
    if tag == "h_poly":
        return _nonneg(_piecewise(t, [(0.0, 2.0, H_POLY_PE)], (0.0, 2.0)))
    if tag == "phi_gauss":
        return _nonneg(PHI_PE(t))
    if t.is_array:
        raise ContractError(f"{tag} evaluates one interval at a time")
    if tag == "eta_star":
        u = t * kind.param
        if u.hi <= 0:
            return Interval(0.0)
        return _mellin_conv_star(u)
    if tag == "eta_plus":
        return _h_H(t, kind.param) * t * iv.exp(-t.sqr() * 0.5)
    raise ValueError(tag)


# norms -----------------------------------------------------------------------

@dataclass(frozen=True)
class NormSet:
    l1: Optional[Interval] = None
    l2: Optional[Interval] = None
    linf: Optional[Interval] = None
    l2_deriv: Optional[Interval] = None
    l1_d3: Optional[Interval] = None
    linf_t: Optional[Interval] = None
    provenance: dict = field(default_factory=dict)
    citations: dict = field(default_factory=dict)

    def get(self, name: str) -> Interval:
        v = getattr(self, name)
        if v is None:
            raise ContractError(f"norm {name} not available")
        return v


def _compact_norms(f: PolyExp, a: float, b: float) -> dict:
    d = f.deriv()
    l1 = polyexp_integral(f, a, b)
    l2sq = polyexp_integral(f * f, a, b)
    l2d = polyexp_integral(d * d, a, b, tol=1e-8)
    tv3 = polyexp_variation(d.deriv(), a, b, panels=2**18)
    linf = polyexp_max(f, a, b)
    linf_t = polyexp_max(f * PolyExp.make((0, 1)), a, b)
    return dict(l1=l1, l2=iv.sqrt(l2sq), linf=linf, l2_deriv=l2d, l1_d3=tv3, linf_t=linf_t)


def _gauss_norms(cut: float = 12.0) -> dict:
    f = PHI_PE
    d = f.deriv()

    def tot(g: PolyExp) -> Interval:
        return polyexp_integral(g, 0.0, cut) + polyexp_tail(g, cut)

    l1 = polyexp_integral(f, 0.0, cut) + phi_tail_majorant(cut)
    t_pe = PolyExp.make((0, 1))
    # phi and t*phi decrease past t = sqrt(3), so the maximum lives in [0, cut]
    return dict(l1=l1, l2=iv.sqrt(tot(f * f)), linf=polyexp_max(f, 0.0, cut),
                l2_deriv=tot(d * d), l1_d3=None, linf_t=polyexp_max(f * t_pe, 0.0, cut))


PINNED_FILE = "pinned_constants.txt"


@functools.lru_cache(maxsize=None)
def norms(kind: SmoothingKind, recompute: bool = False) -> NormSet:
    tag = kind.tag
    if tag == "eta1":
        return NormSet(l1=Interval(1.0), l2=iv.sqrt(Interval(2.0)), linf=Interval(2.0),
                       linf_t=Interval(2.0), provenance=_prov("computed", "l1", "l2", "linf", "linf_t"))
    if tag == "eta2":
        l1 = (integrate_enclose(_eta2_left, 0.25, 0.5, df=lambda s: 4.0 / s).value
              + integrate_enclose(_eta2_right, 0.5, 1.0, df=lambda s: -4.0 / s).value)
        sq_l = integrate_enclose(lambda s: _eta2_left(s).sqr(), 0.25, 0.5,
                                 df=lambda s: _eta2_left(s) * 32.0 / s).value
        sq_r = integrate_enclose(lambda s: _eta2_right(s).sqr(), 0.5, 1.0,
                                 df=lambda s: _eta2_right(s) * -32.0 / s).value
        d2 = integrate_enclose(lambda s: 16.0 / s.sqr(), 0.25, 1.0,
                               df=lambda s: -32.0 / iv.pow_int(s, 3)).value
        return NormSet(l1=l1, l2=iv.sqrt(sq_l + sq_r), linf=iv.LOG2 * 4.0, l2_deriv=d2,
                       linf_t=iv.LOG2 * 2.0,
                       provenance=_prov("computed", "l1", "l2", "linf", "l2_deriv", "linf_t"))
    if tag == "eta_circ":
        return NormSet(**_compact_norms(ETA_CIRC_PE, 0.0, 2.0),
                       provenance=_prov("computed", "l1", "l2", "linf", "l2_deriv", "l1_d3", "linf_t"))
    if tag == "h_poly":
        return NormSet(**_compact_norms(H_POLY_PE, 0.0, 2.0),
                       provenance=_prov("computed", "l1", "l2", "linf", "l2_deriv", "l1_d3", "linf_t"))
    if tag == "phi_gauss":
        return NormSet(**_gauss_norms(), provenance=_prov("computed", "l1", "l2", "linf", "l2_deriv", "linf_t"))
    if tag == "eta_star":
        return _eta_star_norms(kind.param)
    if tag == "eta_plus":
        return _eta_plus_norms(kind.param, recompute)
    raise ValueError(tag)


def _prov(kind: str, *names) -> dict:
    return {n: kind for n in names}


def eta2_over_t_l1() -> Interval:
    """|eta2(t)/t|_1 = 4 (log 2)^2."""
    return iv.LOG2.sqr() * 4.0


def _eta_star_norms(kappa: float) -> NormSet:
    k = Interval(float(kappa))
    ph = norms(PHI_GAUSS)
    e2 = norms(ETA2)
    l1 = e2.l1 * ph.l1 / k
    # Cauchy-Schwarz with the support of eta2 inside [1/4, 1]:
    # |eta2 *_M phi|_2^2 <= (3/4) |eta2/sqrt t|_2^2 |phi|_2^2, |eta2/sqrt t|_2^2 = (32/3)(log 2)^3
    l2sq_hi = Interval(0.75) * iv.pow_int(iv.LOG2, 3) * (32.0 / 3.0) * ph.l2.sqr() / k
    linf_hi = eta2_over_t_l1() * ph.linf
    linf_t_hi = e2.l1 * ph.linf_t / k
    return NormSet(l1=l1, l2=Interval(0.0, iv.sqrt(l2sq_hi).hi), linf=Interval(0.0, linf_hi.hi),
                   linf_t=Interval(0.0, linf_t_hi.hi),
                   provenance=_prov("computed", "l1", "l2", "linf", "linf_t"))


def _eta_plus_norms(H: float, recompute: bool) -> NormSet:
    from .pinned import pinned
    if recompute:
        return _eta_plus_recompute(H)
    if H != 200.0:
        raise ContractError("pinned eta_plus norms exist only for H = 200")
    names = {"l1": "eta_plus.l1", "l2": "eta_plus.l2", "linf": "eta_plus.linf",
             "linf_t": "eta_plus.linf_t"}
    vals = {k: pinned(v) for k, v in names.items()}
    cites = {k: pinned(v, citation=True) for k, v in names.items()}
    return NormSet(**vals, provenance=_prov("pinned", *names), citations=cites)


def _eta_plus_recompute(H: float, t_max: float = 4.0, panels: int = 400) -> NormSet:
    """Slow rigorous (and fairly wide) enclosure of |eta_plus|_1 and |eta_plus|_2."""
    edges = np.linspace(0.0, t_max, panels + 1)
    kind = eta_plus(H)
    l1 = Interval(0.0)
    l2 = Interval(0.0)
    for u, v in zip(edges[:-1], edges[1:]):
        val = eval(kind, Interval(u, v))
        l1 = l1 + abs(val) * (v - u)
        l2 = l2 + val.sqr() * (v - u)
    # t beyond t_max: u >= log(t/2) >= log 2, so |h_H(t)| <= int h(s)/s ds / (pi log 2)
    C = h2_over_s_integral() / (iv.PI * math.log(t_max / 2.0))
    T = Interval(float(t_max))
    tail1 = C * iv.exp(-T.sqr() * 0.5)
    tail2 = C.sqr() * gauss_monomial_tail(2, Interval(1.0), t_max)
    l1 = l1 + Interval(0.0, tail1.hi)
    l2 = iv.sqrt(l2 + Interval(0.0, tail2.hi))
    return NormSet(l1=l1, l2=l2, provenance=_prov("computed", "l1", "l2"))


# Mellin transforms -----------------------------------------------------------

@dataclass(frozen=True)
class CInterval:
    re: Interval
    im: Interval

    @classmethod
    def of(cls, z) -> "CInterval":
        if isinstance(z, CInterval):
            return z
        if isinstance(z, complex):
            return cls(Interval(z.real), Interval(z.imag))
        if isinstance(z, tuple):
            return cls(Interval.coerce(z[0]), Interval.coerce(z[1]))
        return cls(Interval.coerce(z), Interval(0.0))

    def __add__(self, o):
        o = CInterval.of(o)
        return CInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = CInterval.of(o)
        return CInterval(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return CInterval.of(o) - self

    def __mul__(self, o):
        o = CInterval.of(o)
        return CInterval(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def abs2(self) -> Interval:
        return self.re.sqr() + self.im.sqr()

    def __truediv__(self, o):
        o = CInterval.of(o)
        d = o.abs2()
        if d.contains_zero():
            raise DomainError("complex division by an interval containing 0")
        n = self * CInterval(o.re, -o.im)
        return CInterval(n.re / d, n.im / d)

    def __rtruediv__(self, o):
        return CInterval.of(o) / self

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def contains(self, z: complex) -> bool:
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def abs(self) -> Interval:
        return iv.sqrt(self.abs2())

    def __repr__(self):
        return f"({self.re!r} + i{self.im!r})"


def c_exp(z: CInterval) -> CInterval:
    m = iv.exp(z.re)
    return CInterval(m * iv.cos(z.im), m * iv.sin(z.im))


def c_real_pow(base, s: CInterval) -> CInterval:
    """base**s for real base > 0."""
    return c_exp(s * iv.log(Interval.coerce(base)))


def mellin(kind: str, s, a=None, b=None, z=None) -> CInterval:
    """Mellin transforms: 'eta2', 'eta4', 'indicator' on [a, b], 'exp_decay' with rate z."""
    s = CInterval.of(s)
    if kind in ("eta2", "eta4", "indicator") and s.contains_zero():
        raise DomainError("closed form needs s away from 0")
    if kind in ("eta2", "eta4"):
        # eta1 = 2 on [1/2, 1] has transform 2 (1 - 2^-s)/s
        m = (1 - c_real_pow(2.0, CInterval(-s.re, -s.im))) * 2.0 / s
        m = m * m
        return m * m if kind == "eta4" else m
    if kind == "indicator":
        if a is None or b is None:
            raise ContractError("indicator needs a and b")
        if a == 0:
            if not s.re.certainly_pos():
                raise DomainError("a = 0 needs Re s > 0")
            return c_real_pow(b, s) / s
        return (c_real_pow(b, s) - c_real_pow(a, s)) / s
    if kind == "exp_decay":
        return _gamma_over_power(s, z)
    raise ValueError(kind)


def _gamma_over_power(s: CInterval, z) -> CInterval:
    # point arguments only: mpmath with ample precision, then widened
    import mpmath
    if s.re.lo != s.re.hi or s.im.lo != s.im.hi:
        raise ContractError("exp_decay transform supports point s only")
    z = complex(z)
    if z.real <= 0:
        raise DomainError("need Re z > 0")
    with mpmath.workdps(40):
        sv = mpmath.mpc(s.re.lo, s.im.lo)
        v = mpmath.gamma(sv) / mpmath.power(mpmath.mpc(z.real, z.imag), sv)
        re, im = float(v.real), float(v.imag)
    pad = lambda x: Interval(math.nextafter(math.nextafter(x, -math.inf), -math.inf),
                             math.nextafter(math.nextafter(x, math.inf), math.inf))
    return CInterval(pad(re), pad(im))


# Fourier decay ------------------------------------------------------------------

def fourier_decay(kind: SmoothingKind, k: int, t: float) -> Interval:
    """|f^(k)|_1 / (2 pi t)^k bounds |f^(t)| for the Fourier transform f^."""
    ns = norms(kind)
    field_name = {0: "l1", 3: "l1_d3"}.get(k)
    if field_name is None or getattr(ns, field_name) is None:
        raise ContractError(f"no L1 norm of derivative {k} for {kind}")
    val = ns.get(field_name)
    if k == 0:
        return val
    return val / iv.pow_int(iv.PI * 2.0 * float(t), k)


def fourier_transform_circ(t: float) -> CInterval:
    """Rigorous enclosure of int eta_circ(x) e(-x t) dx."""
    f, df = ETA_CIRC_PE, ETA_CIRC_PE.deriv()
    W = iv.PI * 2.0 * float(t)

    def re(x):
        return f(x) * iv.cos(W * x)

    def dre(x):
        return df(x) * iv.cos(W * x) - f(x) * iv.sin(W * x) * W

    def im(x):
        return -f(x) * iv.sin(W * x)

    def dim(x):
        return -(df(x) * iv.sin(W * x) + f(x) * iv.cos(W * x) * W)

    a = integrate_enclose(re, 0.0, 2.0, tol=1e-9, df=dre).value
    b = integrate_enclose(im, 0.0, 2.0, tol=1e-9, df=dim).value
    return CInterval(a, b)


# inner-product degradation and autocorrelation ---------------------------

@dataclass
class CheckResult:
    status: str  # "pass", "fail" or "skipped"
    lhs: Optional[Interval] = None
    bound: Optional[Interval] = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def cauchy_degrade_check(v: Sequence[float], w: Sequence[float]) -> CheckResult:
    """<v,w> = |v||w| + O*(2.71 |v-w|^2) checked exactly in rational arithmetic."""
    vf = [Fraction(float(x)) for x in v]
    wf = [Fraction(float(x)) for x in w]
    V = sum(x * x for x in vf)
    W = sum(x * x for x in wf)
    ip = sum(x * y for x, y in zip(vf, wf))
    d = sum((x - y) ** 2 for x, y in zip(vf, wf))
    if 4 * d > V:
        return CheckResult("skipped", note="needs |w - v| <= |v|/2")
    err = Fraction(271, 100) * d
    P = V * W  # (|v||w|)^2
    upper, lower = ip + err, ip - err
    ok_hi = upper >= 0 and P <= upper * upper
    ok_lo = lower <= 0 or P >= lower * lower
    return CheckResult("pass" if ok_hi and ok_lo else "fail",
                       Interval(ip), Interval(lower, upper))


def autocorr(rho: float) -> Interval:
    """(eta_circ * eta_circ)(rho) = int eta_circ(t) eta_circ(2 - rho + t) dt."""
    sft = Fraction(2) - Fraction(rho)
    g = ETA_CIRC_PE * ETA_CIRC_PE.compose_affine(sft, 1)
    # both factors are nonzero only for t in [0, rho]
    if rho <= 0:
        return Interval(0.0)
    return polyexp_integral(g, 0.0, float(rho))


def autocorr_check(rho: float) -> CheckResult:
    if not 0 <= rho <= 2:
        raise ContractError("rho must lie in [0, 2]")
    ns = norms(ETA_CIRC)
    val = autocorr(rho)
    n2 = polyexp_integral(ETA_CIRC_PE * ETA_CIRC_PE.compose_affine(0, 1), 0.0, 2.0)
    rad = I("2.71") * (Interval(Fraction(2) - Fraction(rho))).sqr() * ns.l2_deriv
    bound = Interval(n2.lo - rad.hi, n2.hi + rad.hi)
    lo_ok = val.lo >= bound.lo
    hi_ok = val.hi <= bound.hi
    return CheckResult("pass" if lo_ok and hi_ok else "fail", val, bound)
