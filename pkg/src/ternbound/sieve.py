"""Large sieve for primes: quotient bounds for G_q and their verification.

The central object is the quotient G_q(Q0/sq) / G_q(Q/sq).  Three regimes
bound it: the trivial bound 1, an easy bound off by about e^gamma, and the
sharp bound (log Q0 + c_+)/(log Q + c_E), which needs a finite
computation over q.  ``espagn_verify`` carries out that computation.

The scan condition for a modulus q and integer R is

    err(q, R) + omega * 7.284 (20000 R)^(-1/3) f1(q) <= (phi(q)/q) kappa(q)

where err(q, R) is G_q(R) minus its main term.  Checking integer R is
enough: G_q only depends on floor(R) and both subtracted terms decrease.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from . import arithfn as af
from . import interval as iv
from .interval import Interval, I

C_PLUS = I("1.36")
Q0_MIN = 100_000
T_MIN = 20000  # ratio Q/Q0 lower bound


class ContractError(ValueError):
    pass


ResourceError = af.ResourceError


@dataclass
class SieveParams:
    Q0: float = 1e5
    Q: float = 2e9
    rho_max: float = 0.6
    c_plus: Interval = C_PLUS
    c_E: Optional[Interval] = None
    Q0_min: float = Q0_MIN
    delta0: float = 8.0

    def __post_init__(self):
        if self.c_E is None:
            self.c_E = af.c_E()

    @property
    def rho(self) -> float:
        return math.log(self.Q0) / math.log(self.Q)

    def check_espagn(self) -> None:
        if self.Q < T_MIN * self.Q0 or self.Q0 < self.Q0_min or self.rho > self.rho_max:
            raise ContractError("need Q >= 20000 Q0, Q0 >= Q0_min, rho <= 0.6")


# the digamma-like bound for q/phi(q) ---------------------------------------

def digamma_F(r) -> Interval:
    """e^gamma log log r + 2.50637 / log log r, for r > e."""
    r = Interval.coerce(r)
    if not r.lo > math.e:
        raise iv.DomainError("need r > e")
    ll = iv.log_log(r)
    return iv.E_GAMMA * ll + I("2.50637") / ll


def merkel_check(q: int, r: float) -> bool:
    if r < max(3, q):
        raise ContractError("need r >= max(3, q)")
    ratio = Fraction(q, af.phi_exact(q))
    return Interval(ratio).certainly_lt(digamma_F(Interval(float(r))))


# easy bounds ------------------------------------------------------------------

def suspiro_product(m: int, q: int) -> Fraction:
    """prod p/(p-1) over primes p dividing q or p <= m."""
    ps = set(af.prime_factors(q)) | set(af.primes_up_to(m).tolist())
    out = Fraction(1)
    for p in ps:
        out *= Fraction(p, p - 1)
    return out


def suspiro_bound(m: int, q: int, const: str = "0.65771") -> Interval:
    if m < 1 or q < 1:
        raise ContractError("need m, q >= 1")
    return iv.E_GAMMA * (iv.log(Interval(float(m)) + iv.log(Interval(float(q)))) + I(const))


def suspiro_critical_constant(m: int, q: int) -> Interval:
    """Smallest constant c with the product <= e^gamma (log(m + log q) + c)."""
    prod = Interval(suspiro_product(m, q))
    return prod / iv.E_GAMMA - iv.log(Interval(float(m)) + iv.log(Interval(float(q))))


def verify_suspiro(limit: float = 8.53) -> tuple[bool, tuple[int, int], Interval]:
    """Check the product bound for all m, q >= 1 with m + log q <= limit.

    Returns (all passed, worst (m, q), worst critical constant).
    """
    worst, arg = None, None
    ok = True
    for m in range(1, int(limit) + 1):
        qmax = int(math.exp(limit - m))
        for q in range(1, qmax + 1):
            c = suspiro_critical_constant(m, q)
            if worst is None or c.hi > worst.hi:
                worst, arg = c, (m, q)
            if not c.hi <= I("0.65771").lo:
                ok = False
    return ok, arg, worst


def quotient_bound_trivial(params: SieveParams, q: int, s: float) -> Interval:
    """Upper bound for G_q(Q0/sq)/G_q(Q/sq) from the e^gamma-lossy argument."""
    Q0, Q = params.Q0, params.Q
    if Q < 182 * Q0 or q > Q0 or s > Q0 / q or q < 1:
        raise ContractError("need Q >= 182 Q0, q <= Q0, s <= Q0/q")
    R = Interval(float(Q0)) / (Interval(float(s)) * float(q))
    num = iv.E_GAMMA * iv.log(R + iv.log(Interval(float(q)))) + I("1.172")
    den = iv.log(Interval(float(Q)) / float(Q0)) + I("1.312")
    return num / den


def c_sigma(sigma) -> Interval:
    s = Interval.coerce(sigma)
    return iv.exp(iv.E_GAMMA.recip() * (s - s.sqr() / I("5.248") - I("1.172")))


def paniz_threshold(sigma, rho: float, Q0: float, q: int) -> Interval:
    """c(sigma) Q0^((1-rho) e^-gamma) - log q; below it the quotient bound holds."""
    sigma = Interval.coerce(sigma)
    if not sigma.lo >= (I("1.312") * rho).hi:
        raise ContractError("need sigma >= 1.312 rho")
    tau = (1.0 - Interval(float(rho))) / iv.E_GAMMA
    return c_sigma(sigma) * iv.pow_real(Interval(float(Q0)), tau) - iv.log(Interval(float(q)))


# the finite verification -------------------------------------------------------

def omega(rho: float, params: SieveParams) -> Interval:
    lq = iv.log(Interval(float(params.Q0_min)))
    return (lq + params.c_plus) / (lq / Interval(float(rho)) + params.c_E)


@dataclass
class QRecord:
    q: int
    varpi: Interval
    lam: Interval
    R_lo: int
    R_hi: int
    status: str          # "vacuous", "pass" or "fail"
    worst_slack: Optional[Interval] = None
    worst_R: Optional[int] = None


@dataclass
class QuotientCertificate:
    q_max_checked: int
    records: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    omega: Optional[Interval] = None
    beta: Optional[Interval] = None
    wall_time: float = 0.0

    @property
    def valid(self) -> bool:
        return not self.failures and all(r.status != "fail" for r in self.records)

    def report(self, block: int = 1000) -> str:
        """Structured text: a summary header, then one line per block of q."""
        scanned = sum(1 for r in self.records if r.status != "vacuous")
        lines = [
            "# quotient certificate",
            f"q_max_checked {self.q_max_checked}",
            f"omega {self.omega!r}",
            f"beta {self.beta!r}",
            f"moduli_scanned {scanned}",
            f"moduli_vacuous {len(self.records) - scanned}",
            f"failures {len(self.failures)}",
            f"status {'valid' if self.valid else 'INVALID'}",
            "# q_lo q_hi min_varpi max_lambda status worst_slack",
        ]
        for i in range(0, len(self.records), block):
            chunk = self.records[i:i + block]
            st = "fail" if any(r.status == "fail" for r in chunk) else \
                ("vacuous" if all(r.status == "vacuous" for r in chunk) else "pass")
            slacks = [r.worst_slack.lo for r in chunk if r.worst_slack is not None]
            ws = f"{min(slacks):.6e}" if slacks else "-"
            lines.append(f"{chunk[0].q} {chunk[-1].q} {min(r.varpi.lo for r in chunk):.6g} "
                         f"{max(r.lam.hi for r in chunk):.6g} {st} {ws}")
        return "\n".join(lines) + "\n"


@dataclass
class _Consts:
    omega: Interval
    beta: Interval
    tau: Interval
    c_cplus: Interval
    c_rho2: Interval
    c_delta: Interval
    c_E: Interval
    q0min: Interval
    c7284: Interval = I("7.284")
    cbrt_tmin: Interval = iv.cbrt(Interval(float(T_MIN)))
    w1: Optional[Interval] = None


def _consts(params: SieveParams) -> _Consts:
    w = omega(params.rho_max, params)
    cE = params.c_E
    cd = params.c_plus - cE
    return _Consts(
        omega=w, beta=w / iv.cbrt(Interval(float(T_MIN))),
        tau=(1.0 - Interval(params.rho_max)) / iv.E_GAMMA,
        c_cplus=c_sigma(params.c_plus),
        c_rho2=iv.exp((I("1.4709") - cE) + w * (cE - I("1.312")) - cd),
        c_delta=cd, c_E=cE, q0min=Interval(float(params.Q0_min)),
        w1=c_sigma(params.c_plus) * iv.pow_real(Interval(float(params.Q0_min)),
                                                (1.0 - Interval(params.rho_max)) / iv.E_GAMMA))


def _prime_log_sum(ps) -> Interval:
    s = Interval(0.0)
    for p in ps:
        s = s + af.log_over_p(p)
    return s


def kappa(q: int, k: _Consts, ps=None, pls=None) -> Interval:
    ps = af.prime_factors(q) if ps is None else ps
    pls = _prime_log_sum(ps) if pls is None else pls
    return (1.0 - k.omega) * (iv.log(Interval(float(q))) - pls) + k.c_delta


def lam(q: int, k: _Consts, ps=None, f1q=None, kq=None) -> Interval:
    ps = af.prime_factors(q) if ps is None else ps
    f1q = af.f1(q, ps) if f1q is None else f1q
    kq = kappa(q, k, ps) if kq is None else kq
    ratio = Interval(Fraction(q, af.phi_exact(q)))
    return iv.pow_int(ratio * k.c7284 * (1.0 + k.beta) * f1q / kq, 3)


def varpi(q: int, k: _Consts) -> Interval:
    lq = iv.log(Interval(float(q)))
    cq = k.c_cplus * iv.pow_real(Interval(float(q)), k.tau)
    w0 = Interval(0.0)
    if cq.lo > (lq + 1.0).hi:
        inner = cq - lq / iv.pow_real(cq - lq, k.tau / (1.0 - k.tau))
        w0 = iv.pow_real(inner, (1.0 - k.tau).recip())
    elif not cq.hi <= (lq + 1.0).lo:
        w0 = Interval(0.0)  # undecided branch: fall back to the smaller candidate
    w1 = k.w1 - lq
    w2 = k.q0min / iv.pow_real(k.c_rho2 * float(q), (1.0 - k.omega).recip())
    # a lower bound for the max is the max of lower bounds
    lo = max(w0.lo, w1.lo, w2.lo)
    hi = max(w0.hi, w1.hi, w2.hi)
    return Interval(lo, hi)


def check_modulus(q: int, k: _Consts, tables: af.MultTables,
                  chunk: int = 1 << 22) -> QRecord:
    ps = af.prime_factors(q, tables if q <= tables.limit else None)
    vp = varpi(q, k)
    pls = _prime_log_sum(ps)
    f1q = af.f1(q, ps)
    kq = kappa(q, k, ps, pls)
    lm = lam(q, k, ps, f1q, kq)
    R_lo = max(1, int(math.floor(vp.lo)))
    R_hi = int(math.ceil(lm.hi)) - 1
    if R_hi < R_lo:
        return QRecord(q, vp, lm, R_lo, R_hi, "vacuous")
    if R_hi > tables.limit:
        raise ResourceError(f"modulus {q} needs tables up to {R_hi}; limit is {tables.limit}")
    gt = af.GTable.build(q, R_hi, tables)
    ratio = Interval(Fraction(af.phi_exact(q), q))
    shift = k.c_E + pls
    rhs = ratio * kq
    coef = k.omega * k.c7284 * f1q / k.cbrt_tmin
    worst = None
    worst_R = None
    for a in range(R_lo, R_hi + 1, chunk):
        n = np.arange(a, min(a + chunk, R_hi + 1), dtype=np.int64)
        nf = Interval.coerce(n.astype(np.float64))
        err = gt.values(n) - ratio * (iv.log(nf) + shift)
        lhs = err + coef / iv.cbrt(nf)
        slack_lo = rhs.lo - lhs.hi
        i = int(np.argmin(slack_lo))
        s = Interval(float(slack_lo[i]), float(rhs.hi - lhs.lo[i]))
        if worst is None or s.lo < worst.lo:
            worst, worst_R = s, int(n[i])
    status = "pass" if worst.lo > 0 else "fail"
    return QRecord(q, vp, lm, R_lo, R_hi, status, worst, worst_R)


def required_table_limit(q_max: int, params: SieveParams) -> int:
    k = _consts(params)
    return max(int(math.ceil(lam(q, k).hi)) for q in range(1, min(q_max, 64) + 1))


def espagn_verify(q_max: int, params: Optional[SieveParams] = None,
                  tables: Optional[af.MultTables] = None,
                  moduli: Optional[Iterable[int]] = None,
                  progress=None) -> QuotientCertificate:
    """Scan every modulus q <= q_max (or the given moduli) for the quotient condition."""
    params = params or SieveParams()
    k = _consts(params)
    if tables is None:
        tables = af.build_tables(required_table_limit(q_max, params))
    # a modulus whose range exceeds the tables raises ResourceError naming the limit
    t0 = time.time()
    cert = QuotientCertificate(q_max, omega=k.omega, beta=k.beta)
    for q in (moduli if moduli is not None else range(1, q_max + 1)):
        rec = check_modulus(q, k, tables)
        cert.records.append(rec)
        if rec.status == "fail":
            cert.failures.append(q)
        if progress is not None and q % 10000 == 0:
            progress(q)
    cert.wall_time = time.time() - t0
    return cert


def full_scale_moduli(q_plain: int = 3_300_000_000, q_special: int = 22_000_000_000):
    """All q below q_plain, then multiples of 210 up to q_special."""
    yield from range(1, q_plain)
    start = -(-q_plain // 210) * 210
    yield from range(start, q_special, 210)


# large sieve factor ------------------------------------------------------------

@dataclass
class SieveFactor:
    factor: Interval
    variant: str
    trivial: bool
    scale: Optional[Interval] = None


def large_sieve_factor(params: SieveParams, variant: str = "arcs_plain",
                       N: Optional[float] = None) -> SieveFactor:
    Q0, Q = float(params.Q0), float(params.Q)
    cp, cE = params.c_plus, params.c_E
    if variant == "arcs_plain" or variant == "discrete":
        ok = Q0 <= Q ** 0.6 and Q >= T_MIN * Q0 and Q0 >= params.Q0_min
        num = iv.log(Interval(Q0)) + cp
        den = iv.log(Interval(Q)) + cE
    elif variant == "arcs_parity":
        ok = 2 * Q0 <= (2 * Q) ** 0.6 and Q >= T_MIN * Q0 and Q0 >= params.Q0_min
        num = iv.log(Interval(2 * Q0)) + cp
        den = iv.log(Interval(2 * Q)) + cE
    else:
        raise ValueError(f"unknown variant {variant!r}")
    scale = None
    if variant == "discrete":
        if N is None:
            raise ContractError("discrete variant needs N")
        scale = Interval(float(N)) + Interval(Q).sqr()
    if not ok:
        return SieveFactor(Interval(1.0), variant, True, scale)
    f = num / den
    if f.hi >= 1:
        return SieveFactor(Interval(1.0), variant, True, scale)
    return SieveFactor(f, variant, False, scale)
