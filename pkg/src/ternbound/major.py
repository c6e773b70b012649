"""Major-arc bounds: the l2 integral of S_{eta_+}, the singular series C_0,
the main-term constant C_{eta_circ, eta_*}, and the assembled lower bound
for the integral of S_{eta_+}^2 S_{eta_*} e(-N alpha) over the major arcs.

The exponential-sum error constants are imported (see ``pinned``); each one
is re-derived here from its imported components and refused if the stated
bound does not follow from them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

import numpy as np

from . import interval as iv
from . import arithfn as af
from . import smoothing as sm
from .interval import Interval, I
from .pinned import pinned

X_PLUS = 4.9e26
# pi(t) <= 1.25506 t / log t for t > 1 (Rosser and Schoenfeld)
PI_RATIO = I("1.25506")
# constants of the l2 bound and of the ternary integral bound
C_ET = I("5.19")
C_CHET = I("1.7")
C_CHET_TAIL = (I("0.64787"), I("0.425"))
C_EPS = I("2.82643")
C_R = I("4.31004")
C_D3 = I("0.0012")
C_D3_ALT = I("0.00113")
C_E = I("1.6812")
C_MOMENT = I("2.71")


class ContractError(ValueError):
    pass


def _xdec(x: float) -> Interval:
    return I(repr(float(x)))


def _up(v: Interval) -> Interval:
    return Interval(0.0, v.hi)


def _sqrt_up(v: Interval) -> Interval:
    return iv.sqrt(Interval(max(v.lo, 0.0), v.hi))


@dataclass(frozen=True)
class MajorParams:
    """Parameters of the major arcs and the imported error bounds (upper ends)."""
    r: int = 150_000
    delta0: float = 8.0
    x_plus: float = X_PLUS
    kappa: float = 49.0
    ET_plus: Interval = field(default_factory=lambda: pinned("ET_plus.bound"))
    E_plus: Interval = field(default_factory=lambda: pinned("E_plus.bound"))
    # kappa * E_{eta_*, r, delta0}
    E_star: Interval = field(default_factory=lambda: pinned("E_star.bound"))
    err_star_T: Interval = field(default_factory=lambda: pinned("err_star_T.bound"))
    S_main: Interval = field(default_factory=lambda: pinned("S_sum.main"))
    S_err: Interval = field(default_factory=lambda: pinned("S_sum.err"))
    S_err_sqrt: Interval = field(default_factory=lambda: pinned("S_sum.err_sqrt"))
    S_linear: Interval = field(default_factory=lambda: pinned("S_sum.linear"))

    def __post_init__(self):
        if self.r < 182:
            raise ContractError("need r >= 182")
        if self.kappa < 1:
            raise ContractError("need kappa >= 1")
        if not Fraction(repr(float(self.x_plus))) >= Fraction(10) ** 15:
            raise ContractError("need x_plus >= 10^15")

    @property
    def x_iv(self) -> Interval:
        return _xdec(self.x_plus)

    @property
    def kappa_iv(self) -> Interval:
        return _xdec(self.kappa)

    @property
    def sqrt_2r(self) -> Interval:
        return iv.sqrt(Interval(2.0 * self.r))


def pinned_derivations(params: MajorParams) -> dict:
    """Recompute each imported bound from its components: name -> (recomputed, stated)."""
    sx = iv.sqrt(params.x_iv)
    s2r = params.sqrt_2r
    ET = pinned("ET_plus.const") + pinned("ET_plus.sqrt") / sx
    E = (pinned("E_plus.const") + pinned("E_plus.const_q2") / iv.sqrt(Interval(2.0))
         + (pinned("E_plus.sqrt") + pinned("E_plus.sqrt_r") * s2r) / sx)
    Es = pinned("E_star.const") + (pinned("E_star.sqrt") + pinned("E_star.sqrt_r") * s2r) / sx
    EsT = pinned("E_star.const") + (pinned("E_star.sqrt") + pinned("E_star.sqrt_r")) / sx
    S_err = params.S_err + params.S_err_sqrt / sx
    return {
        "ET_plus": (ET, params.ET_plus),
        "E_plus": (E, params.E_plus),
        "E_star": (Es, params.E_star),
        "err_star_T": (EsT, params.err_star_T),
        # the error of the S-coefficient is absorbed into 3e-6
        "S_sum.err": (S_err, Interval(0.0, 3e-6)),
    }


def check_pinned_inputs(params: MajorParams) -> dict:
    out = pinned_derivations(params)
    for name, (got, stated) in out.items():
        if not got.hi <= stated.hi:
            raise ContractError(f"pinned input {name}: derivation gives {got.hi!r} > stated {stated.hi!r}")
    return out


def circ_norms() -> sm.NormSet:
    return sm.norms(sm.ETA_CIRC)


def plus_norms() -> sm.NormSet:
    return sm.norms(sm.eta_plus(200.0))


@dataclass
class L2Major:
    """(1/x) times the integral of |S_{eta_+}|^2 over the major arcs."""
    L: Interval
    A: Interval
    parts: dict

    @property
    def J(self) -> Interval:
        return self.A


@lru_cache(maxsize=4)
def _odd_sum(r: int) -> Interval:
    return af.odd_squarefree_sum(r, af.build_tables(r))


def K_r2(params: MajorParams, x: Interval, S0: Interval, linf: Interval) -> Interval:
    """K_{r,2} with |S_eta(0, x)|/x <= S0."""
    a = (params.sqrt_2r + 1.0) * iv.log(x).sqr() * linf
    return a * (S0 * 2.0 + a / x)


def l2_major(params: Optional[MajorParams] = None, norms: Optional[sm.NormSet] = None,
             circ: Optional[sm.NormSet] = None) -> L2Major:
    p = params or MajorParams()
    check_pinned_inputs(p)
    nplus = norms or plus_norms()
    nc = circ or circ_norms()
    r = Interval(float(p.r))
    d0 = _xdec(p.delta0)
    x = p.x_iv
    G = _odd_sum(p.r)
    l2c = nc.get("l2")
    dist = pinned("eta_plus.dist_circ_l2")
    L_hi = (G * nplus.get("l2").sqr() * 2.0).hi
    logr = iv.log(r)
    mix = (logr + C_CHET) * (l2c * dist * 2.0 + dist.sqr())
    d3 = nc.get("l1_d3").sqr() * 2.0 / (iv.pow_int(iv.PI, 6) * iv.pow_int(d0, 5) * 5.0)
    tail = C_CHET_TAIL[0] + logr / (r * 4.0) + C_CHET_TAIL[1] / r
    L_circ = G * l2c.sqr() * 2.0 + iv.pm((mix + d3 * tail).hi)
    L = Interval(L_circ.lo, min(L_circ.hi, L_hi))
    ET = _up(p.ET_plus)
    l1 = nplus.get("l1")
    S0 = Interval(0.0, (l1 + ET).hi)
    K = K_r2(p, x, S0, nplus.get("linf"))
    err_ET = d0 * r * C_ET * (ET * (l1 + ET * 0.5))
    log2e2r = iv.log(r * 2.0) + 2.0
    err_E = d0 * r * log2e2r * (_up(p.E_plus).sqr() + K / x)
    A = L + iv.pm((err_ET + err_E).hi)
    parts = {
        "odd_sum": G, "L_upper": Interval(L_hi), "L_circ": L_circ,
        "mix_term": mix, "d3_term": d3, "S0": S0, "K_r2": K, "K_r2/x": K / x,
        "K_r2/log^2": K / iv.log(x).sqr(), "err_ET": err_ET, "err_E": err_E,
    }
    return L2Major(L=L, A=A, parts=parts)


def _tail_recip_sq(cut: int) -> Interval:
    """Upper bound for the sum of 1/(p-1)^2 over primes p > cut."""
    X = Interval(float(cut))
    s = PI_RATIO * 2.0 / (X * iv.log(X))
    return _up(s * (X / (X - 1.0)).sqr())


@lru_cache(maxsize=4)
def C0_lower(cut: int = af.DEFAULT_PRIME_CUT) -> Interval:
    """2 prod_{p > 2} (1 - 1/(p-1)^2), a lower bound for C_0 whenever N is even."""
    ps = af._primes(cut)
    odd = ps[ps > 2]
    u = Interval(1.0) / Interval.coerce(((odd - 1) * (odd - 1)).astype(np.float64))
    head = iv.exp(iv.isum(iv.log1p(-u)))
    # -log(1 - u) <= u + u^2 and u < 1/cut^2 beyond the cut
    t = _tail_recip_sq(cut) * (1.0 + 1.0 / cut)
    return head * Interval(iv.exp(-t).lo, 1.0) * 2.0


@lru_cache(maxsize=4)
def _cube_product(cut: int) -> Interval:
    ps = af._primes(cut)
    pm1 = Interval.coerce((ps - 1).astype(np.float64))
    head = iv.exp(iv.isum(iv.log1p(Interval(1.0) / iv.pow_int(pm1, 3))))
    # sum_{n >= cut} 1/n^3 <= 1/(2 (cut-1)^2)
    t = Interval(1.0) / (Interval(float(cut - 1)).sqr() * 2.0)
    return head * Interval(1.0, iv.exp(t).hi)


def _distinct_primes(N: int) -> list:
    out, p = [], 2
    while p * p <= N:
        if N % p == 0:
            out.append(p)
            while N % p == 0:
                N //= p
        p += 1 if p == 2 else 2
    if N > 1:
        out.append(N)
    return out


def C0_exact(N: Union[int, Iterable[int]], cut: int = 1_000_000) -> Interval:
    """prod_{p|N} (1 - 1/(p-1)^2) prod_{p not dividing N} (1 + 1/(p-1)^3).

    ``N`` is an integer (factored by trial division) or its prime divisors.
    """
    primes = _distinct_primes(N) if isinstance(N, int) else sorted(set(int(p) for p in N))
    if 2 in primes:
        return Interval(0.0)
    val = _cube_product(cut)
    for p in primes:
        q = Interval(float(p - 1))
        hit = Interval(1.0) - Interval(1.0) / q.sqr()
        if p <= cut:
            val = val * hit / (Interval(1.0) + Interval(1.0) / iv.pow_int(q, 3))
        else:
            val = val * hit
    return val


def c1_optimal() -> Interval:
    return I(9) / 4 / iv.sqrt(iv.PI * 2.0)


def C_eta_star_parts(kappa: float = 49.0, circ: Optional[sm.NormSet] = None) -> dict:
    nc = circ or circ_norms()
    k = _xdec(kappa)
    c1 = c1_optimal()
    sp = iv.SQRT_HALF_PI
    moment = sp * (I(49) / 48) - c1 * 2.25 + sp * c1.sqr()
    moment_term = _up(C_MOMENT * nc.get("l2_deriv") * moment / iv.pow_int(k, 3))
    gauss_tail = (Interval(2.0) + Interval(1.0) / k.sqr()) * iv.exp(-(k.sqr() * 2.0))
    int_lo = sp / k - gauss_tail
    l2sq = nc.get("l2").sqr()
    lo = (l2sq * int_lo).lo - moment_term.hi
    hi = (l2sq * sp / k).hi + moment_term.hi
    slack = (l2sq * gauss_tail * k + moment_term * k)
    return {"c1": c1, "moment": moment, "moment_term": moment_term, "gauss_tail": gauss_tail,
            "phi_l1_circ_l2sq": sp * l2sq, "kappa_slack": slack, "C": Interval(lo, hi)}


def C_eta_star(kappa: float = 49.0, circ: Optional[sm.NormSet] = None) -> Interval:
    """Enclosure of C_{eta_circ, eta_*} for N/x = 2 + c1/kappa with the optimal c1."""
    return C_eta_star_parts(kappa, circ)["C"]


def _phi_log_sup() -> Interval:
    """sup over t >= 1 of t^2 exp(-t^2/2) log t."""
    def f(t):
        return t.sqr() * iv.exp(-t.sqr() * 0.5) * iv.log(t)

    def df(t):
        return iv.exp(-t.sqr() * 0.5) * (t * iv.log(t) * (Interval(2.0) - t.sqr()) + t)
    head = iv.enclose_max(f, Interval(1.0, 12.0), tol=1e-9, df=df)
    # beyond 12 the function is decreasing and below 1e-28
    return Interval(max(head.lo, 0.0), head.hi)


def aux_bounds(x: float = X_PLUS, params: Optional[MajorParams] = None,
               norms: Optional[sm.NormSet] = None) -> dict:
    """Bounds for LS_{eta_*}, LS_{eta_+}, Z_{eta_+^2,2}/x, Z_{eta_*^2,2} and |eta_*|_2^2."""
    p = params or MajorParams()
    if not Fraction(repr(float(x))) >= Fraction(repr(float(p.x_plus))):
        raise ContractError("need x >= x_plus")
    nplus = norms or plus_norms()
    xi = _xdec(x)
    k = p.kappa_iv
    lx = iv.log(xi)
    logr = iv.log(Interval(float(p.r)))
    star = sm.norms(sm.eta_star(p.kappa))
    phi_linf = Interval(2.0) / iv.E
    phi_t = iv.pow_real(Interval(3.0) / iv.E, 1.5)
    star_linf = _up(sm.eta2_over_t_l1() * phi_linf)
    star_t = _up(phi_t / k)
    phi_log = _phi_log_sup()
    star_log = _up(sm.eta2_over_t_l1() * phi_log)
    LS_star = (star_linf / iv.LOG2 * lx + star_t * 2.0) * logr
    LS_plus = (nplus.get("linf") / iv.LOG2 * lx + nplus.get("linf_t") * 2.0) * logr
    Z_plus = (p.S_main + iv.pm((p.S_err + p.S_err_sqrt / iv.sqrt(xi)).hi)) * lx - p.S_linear
    Z_plus = _up(Z_plus)
    Z_star = _up((star.l1 + _up(p.err_star_T)) * (star_log + star_linf * (lx - iv.log(k))))
    l2sq = _up(I(3) / 4 * (I(32) / 3) * iv.pow_int(iv.LOG2, 3) * (I(3) / 8)
               * iv.sqrt(iv.PI) / k)
    return {
        "log x": lx, "LS_star": LS_star, "LS_plus": LS_plus, "Z_plus2": Z_plus,
        "Z_star2": Z_star, "eta_star_l2sq": l2sq, "eta_star_linf": star_linf,
        "eta_star_linf_t": star_t, "phi_log_sup": phi_log, "eta_star_log_sup": star_log,
        "LS_star/log x": LS_star / lx, "LS_plus/log x": LS_plus / lx,
        "Z_plus2/log x": Z_plus / lx, "Z_star2/log x": Z_star / lx,
    }


def third_line(aux: dict) -> Interval:
    """2 Z_{+} LS_* + 4 sqrt(Z_+ Z_*) LS_+, coefficient of x."""
    Zp, Zs = aux["Z_plus2"], aux["Z_star2"]
    return _up(Zp * aux["LS_star"] * 2.0 + _sqrt_up(Zp * Zs) * aux["LS_plus"] * 4.0)


@dataclass
class MajorBound:
    L: Interval
    A_eta: Interval
    C0_low: Interval
    C_eta: Interval
    total_coeff: Interval  # coefficient of x^2/kappa
    parts: dict = field(default_factory=dict)

    def recompute_total(self) -> Interval:
        """C_0 C_eta kappa minus the three error lines, all over kappa."""
        c = self.parts
        k = c["kappa"]
        main = self.C0_low * self.C_eta * k
        err = c["eps_line"] * c["eta_star_l1"] * k + c["second_line"] * k + c["third_line/x"] * k
        return main - _up(err)


def nefumo_total(params: Optional[MajorParams] = None, norms: Optional[sm.NormSet] = None,
                 circ: Optional[sm.NormSet] = None, l2: Optional[L2Major] = None,
                 x: Optional[float] = None) -> MajorBound:
    p = params or MajorParams()
    check_pinned_inputs(p)
    nplus = norms or plus_norms()
    nc = circ or circ_norms()
    l2 = l2 or l2_major(p, nplus, nc)
    xv = p.x_plus if x is None else x
    xi = _xdec(xv)
    k = p.kappa_iv
    r = Interval(float(p.r))
    l2c = nc.get("l2")
    dist = pinned("eta_plus.dist_circ_l2")
    d3sq = nc.get("l1_d3").sqr() / iv.pow_int(_xdec(p.delta0), 5)
    # |eta_circ|_2^2 (2 + eps0) eps0 with eps0 = dist / |eta_circ|_2
    eps_part = C_EPS * (l2c * dist * 2.0 + dist.sqr())
    eps_line = _up(eps_part + (C_R * l2c.sqr() + C_D3 * d3sq) / r)
    eps_line_alt = _up(eps_part + (C_R * l2c.sqr() + C_D3_ALT * d3sq) / r)
    aux = aux_bounds(xv, p, nplus)
    A = _up(l2.A)
    star_l2 = _sqrt_up(aux["eta_star_l2sq"])
    second = _up(_up(p.E_star) / k * A
                 + _up(p.E_plus) * C_E * (_sqrt_up(A) + C_E * nplus.get("l2")) * star_l2)
    third = third_line(aux)
    third_x = _up(third / xi)
    star_l1 = iv.SQRT_HALF_PI / k
    C0 = Interval(C0_lower().lo)
    ce = C_eta_star_parts(p.kappa, nc)
    C = ce["C"]
    err = _up(eps_line * star_l1 + second + third_x)
    total = C0 * Interval(C.lo) * k - err * k
    total = Interval(total.lo, total.lo)
    parts = {
        "kappa": k, "eps_line": eps_line, "eps_line_alt": eps_line_alt, "eta_star_l1": star_l1,
        "second_line": second, "second_line*kappa": second * k, "third_line": third,
        "third_line/x": third_x, "third_line/log^2": third / aux["log x"].sqr(),
        "error": err, "error*kappa": err * k, "main*kappa": C0 * Interval(C.lo) * k,
        "C_eta*kappa": C * k, "aux": aux, "C_eta_parts": ce, "l2": l2.parts,
    }
    return MajorBound(L=l2.L, A_eta=l2.A, C0_low=C0, C_eta=Interval(C.lo), total_coeff=total,
                      parts=parts)
