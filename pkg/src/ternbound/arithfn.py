"""Multiplicative-function tables, the sums G_q(R), and convergent sums over phi(q).

Sums of 1/phi(r) over millions of terms are accumulated in 64-bit fixed
point with scale 2**FIX_BITS: each term contributes floor(2^S/phi) to a
lower accumulator and ceil(2^S/phi) to an upper one.  Both accumulators
are exact integers, so the only rounding happens once, at conversion.
"""
from __future__ import annotations

import hashlib
import math
import os
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Optional

import numpy as np

from . import interval as iv
from .interval import Interval, ProofOutcome, I

FIX_BITS = 56
_FIX_ONE = np.int64(1) << np.int64(FIX_BITS)
BLOCK = 1 << 22
DEFAULT_MEMORY_ENTRIES = 400_000_000
# prime cut for Euler products; the 1/cut tail needs cut >= 1e7 for 7 digits
DEFAULT_PRIME_CUT = 10_000_000
# theta(t) <= 1.01624 t for all t > 0 (Rosser and Schoenfeld)
THETA_RATIO = I("1.01624")

CACHE_MAGIC = b"TBMULT\x00\x01"
CACHE_VERSION = 1


class ResourceError(RuntimeError):
    pass


class ContractError(ValueError):
    pass


# primes -------------------------------------------------------------------

def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    s[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if s[p]:
            s[p * p::2 * p] = False
    return np.flatnonzero(s).astype(np.int64)


def prime_factors(n: int, tables: Optional["MultTables"] = None) -> list[int]:
    """Distinct prime factors of n, ascending."""
    out = []
    if tables is not None and n <= tables.limit:
        while n > 1:
            p = int(tables.lpf[n])
            out.append(p)
            while n % p == 0:
                n //= p
        return out
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def phi_exact(n: int) -> int:
    r = n
    for p in prime_factors(n):
        r -= r // p
    return r


def is_squarefree(n: int) -> bool:
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1
    return True


# tables -------------------------------------------------------------------

@dataclass
class MultTables:
    limit: int
    mu_sq: np.ndarray  # uint8, index q
    phi: np.ndarray    # int64, index q
    lpf: np.ndarray    # int64, index q; lpf[1] = 1
    cache_path: Optional[str] = field(default=None, repr=False)
    _fix: Optional[tuple] = field(default=None, repr=False, compare=False)

    def fix_terms(self) -> tuple[np.ndarray, np.ndarray]:
        """floor and ceil of 2^S mu^2(r)/phi(r) for r <= limit (index 0 is 0)."""
        if self._fix is None:
            den = self.phi.copy()
            den[0] = 1
            keep = self.mu_sq == 1
            keep[0] = False
            self._fix = _fix_terms(den, keep)
        return self._fix

    def save(self, path: str) -> None:
        payload = (self.phi[: self.limit + 1].astype("<u4").tobytes()
                   + self.mu_sq[: self.limit + 1].astype("u1").tobytes()
                   + self.lpf[: self.limit + 1].astype("<u4").tobytes())
        digest = hashlib.sha256(payload).digest()
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(struct.pack("<IQ", CACHE_VERSION, self.limit))
            fh.write(payload)
            fh.write(digest)
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str) -> "MultTables":
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:8] != CACHE_MAGIC:
            raise ValueError("not a table cache file")
        version, limit = struct.unpack_from("<IQ", blob, 8)
        if version != CACHE_VERSION:
            raise ValueError(f"cache version {version} unsupported")
        n = limit + 1
        start = 8 + 12
        payload = blob[start: start + 9 * n]
        if hashlib.sha256(payload).digest() != blob[start + 9 * n:]:
            raise ValueError("cache checksum mismatch")
        phi = np.frombuffer(payload, dtype="<u4", count=n).astype(np.int64)
        mu = np.frombuffer(payload, dtype="u1", count=n, offset=4 * n).copy()
        lpf = np.frombuffer(payload, dtype="<u4", count=n, offset=5 * n).astype(np.int64)
        return cls(limit, mu, phi, lpf, cache_path=path)


def build_tables(N: int, block: int = BLOCK,
                 memory_entries: int = DEFAULT_MEMORY_ENTRIES) -> MultTables:
    """Segmented sieve of mu^2, phi and least prime factor for q <= N."""
    if N < 1:
        raise ContractError("N must be at least 1")
    if N + 1 > memory_entries:
        raise ResourceError(f"table limit {N} exceeds memory budget of {memory_entries} entries")
    small = primes_up_to(math.isqrt(N))
    phi = np.zeros(N + 1, dtype=np.int64)
    lpf = np.zeros(N + 1, dtype=np.int64)
    mu = np.zeros(N + 1, dtype=np.uint8)
    for start in range(1, N + 1, block):
        stop = min(start + block, N + 1)
        n = np.arange(start, stop, dtype=np.int64)
        rem = n.copy()
        ph = n.copy()
        lp = np.zeros(stop - start, dtype=np.int64)
        sqf = np.ones(stop - start, dtype=bool)
        for p in small.tolist():
            first = -(-start // p) * p
            if first >= stop:
                continue
            sl = slice(first - start, None, p)
            ph[sl] -= ph[sl] // p
            view = lp[sl]
            view[view == 0] = p
            lp[sl] = view
            pk = p
            while pk < stop:
                f = -(-start // pk) * pk
                if f < stop:
                    rem[f - start::pk] //= p
                if pk == p:
                    f2 = -(-start // (p * p)) * (p * p)
                    if f2 < stop:
                        sqf[f2 - start::p * p] = False
                pk *= p
        big = rem > 1  # one prime factor above sqrt(N) remains
        ph[big] -= ph[big] // rem[big]
        lp[(lp == 0) & big] = rem[(lp == 0) & big]
        lp[n == 1] = 1
        phi[start:stop] = ph
        lpf[start:stop] = lp
        mu[start:stop] = sqf
    return MultTables(N, mu, phi, lpf)


def load_or_build(N: int, path: Optional[str] = None) -> MultTables:
    if path and os.path.exists(path):
        try:
            t = MultTables.load(path)
            if t.limit >= N:
                return t
        except ValueError:
            pass
    t = build_tables(N)
    if path:
        t.save(path)
        t.cache_path = path
    return t


# fixed-point sums ---------------------------------------------------------

def _fix_terms(den: np.ndarray, keep: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo = np.where(keep, _FIX_ONE // den, 0).astype(np.int64)
    hi = lo + (keep & (_FIX_ONE % den != 0))
    return lo, hi


def fix_to_interval(lo, hi) -> Interval:
    """Convert fixed-point integer bounds (scalars or arrays) to an Interval."""
    scale = 2.0 ** -FIX_BITS
    flo = np.nextafter(np.asarray(lo, dtype=np.float64), -np.inf) * scale
    fhi = np.nextafter(np.asarray(hi, dtype=np.float64), np.inf) * scale
    flo = np.maximum(flo, 0.0)
    if flo.ndim == 0:
        return Interval(float(flo), float(fhi))
    return Interval(flo, fhi)


def coprime_mask(q: int, n_max: int, tables: Optional[MultTables] = None) -> np.ndarray:
    m = np.ones(n_max + 1, dtype=bool)
    m[0] = False
    for p in prime_factors(q, tables):
        m[p::p] = False
    return m


@dataclass
class GTable:
    """Cumulative sums of mu^2(r)/phi(r) over r <= R, (r, q) = 1."""

    q: int
    limit: int
    lo_cum: np.ndarray
    hi_cum: np.ndarray
    phi_q: int = 1

    @classmethod
    def build(cls, q: int, R_max: int, tables: MultTables, odd_only: bool = False) -> "GTable":
        if R_max > tables.limit:
            raise ContractError(f"R = {R_max} beyond table limit {tables.limit}")
        tlo, thi = tables.fix_terms()
        lo, hi = tlo[: R_max + 1].copy(), thi[: R_max + 1].copy()
        drop = [2] if odd_only else []
        for p in prime_factors(q, tables if q <= tables.limit else None) + drop:
            lo[p::p] = 0
            hi[p::p] = 0
        return cls(q, R_max, np.cumsum(lo), np.cumsum(hi), phi_q=phi_exact(q))

    def value(self, R) -> Interval:
        n = int(math.floor(R))
        if n > self.limit:
            raise ContractError(f"R = {R} beyond table limit {self.limit}")
        if n < 1:
            return Interval(0.0)
        return fix_to_interval(self.lo_cum[n], self.hi_cum[n])

    def values(self, n: np.ndarray) -> Interval:
        n = np.asarray(n, dtype=np.int64)
        if n.size and int(n.max()) > self.limit:
            raise ContractError("R beyond table limit")
        return fix_to_interval(self.lo_cum[n], self.hi_cum[n])


def G_q(q: int, R, tables: MultTables) -> Interval:
    if R > tables.limit:
        raise ContractError(f"R = {R} beyond table limit {tables.limit}")
    return GTable.build(q, int(math.floor(R)), tables).value(R)


def G_exact(q: int, R) -> Fraction:
    """Direct rational summation; meant for small R."""
    s = Fraction(0)
    for r in range(1, int(math.floor(R)) + 1):
        if math.gcd(r, q) == 1 and is_squarefree(r):
            s += Fraction(1, phi_exact(r))
    return s


def odd_squarefree_sum(r: int, tables: MultTables) -> Interval:
    """Sum of mu^2(q)/phi(q) over odd q <= r."""
    return GTable.build(2, r, tables).value(r)


def verify_G_windows(R_max: int, tables: MultTables, continuous: bool = False) -> dict:
    """Check log R + 1.312 <= G(R) <= log R + 1.354 and the G_2 analogue.

    Integer R are scanned.  With continuous=True the stronger statement for
    all real R in [n, n+1) is checked, i.e. the lower bound at n+1.
    """
    out = {}
    specs = [
        ("G_lower", 1, 182, "1.312", None, 1),
        ("G_upper", 1, 120, None, "1.354", 1),
        ("G2_lower", 2, 200, "1.661", None, 2),
        ("G2_upper", 2, 200, None, "1.698", 2),
    ]
    cache = {}
    for label, q, r0, lo_c, hi_c, div in specs:
        if R_max < r0:
            out[label] = ProofOutcome("proven", 0, None, 0, label)
            continue
        if q not in cache:
            cache[q] = GTable.build(q, R_max, tables)
        tab = cache[q]
        n = np.arange(r0, R_max + 1, dtype=np.int64)
        g = tab.values(n)
        if lo_c is not None:
            at = n + 1 if continuous else n
            bound = (iv.log(Interval.coerce(at.astype(np.float64))) + I(lo_c)) * (1.0 / div)
            ok = g.lo >= bound.hi
        else:
            bound = (iv.log(Interval.coerce(n.astype(np.float64))) + I(hi_c)) * (1.0 / div)
            ok = g.hi <= bound.lo
        bad = np.flatnonzero(~ok)
        if bad.size:
            R = int(n[bad[0]])
            out[label] = ProofOutcome("unproven", 0, Interval(float(R)), int(n.size), label)
        else:
            out[label] = ProofOutcome("proven", 0, None, int(n.size), label)
    return out


# sums over primes ---------------------------------------------------------

_PRIME_CACHE: dict[int, np.ndarray] = {}


def _primes(cut: int) -> np.ndarray:
    if cut not in _PRIME_CACHE:
        _PRIME_CACHE[cut] = primes_up_to(cut)
    return _PRIME_CACHE[cut]


def _euler_product(a: Interval, tail_sum: Interval) -> Interval:
    """prod(1 + a_p) over listed primes times the tail factor [1, exp(tail_sum)]."""
    head = iv.exp(iv.isum(iv.log1p(a)))
    return head * Interval(1.0, iv.exp(tail_sum).hi)


def _recip_pp1(p: np.ndarray) -> Interval:
    # 1/(p(p-1)), exact denominators for p < 9e7
    return Interval(1.0) / Interval.coerce((p * (p - 1)).astype(np.float64))


def convergent_products(cut: int = DEFAULT_PRIME_CUT) -> dict:
    p = _primes(cut)
    odd = p[p > 2]
    tail = Interval(1.0) / Interval(float(cut))
    odd_prod = _euler_product(_recip_pp1(odd), tail)
    nagasa = odd_prod * 2.0  # the p = 2 factor is 1 + 2/(2*1)
    # 1/(p-1)^2 <= 1/((n-1)(n-2)) and the sum over n > cut telescopes to 1/(cut-1)
    pm1 = Interval.coerce(((p - 1) * (p - 1)).astype(np.float64))
    massacre = _euler_product(Interval(1.0) / pm1, Interval(1.0) / Interval(float(cut - 1)))
    return {"nagasa": nagasa, "nagasa2": odd_prod, "massacre": massacre}


def zeta_ratio(j: int, cut: int = DEFAULT_PRIME_CUT) -> Interval:
    """zeta(j)/zeta(2j) = prod_p (1 + p^-j)."""
    p = Interval.coerce(_primes(cut).astype(np.float64))
    a = iv.pow_int(p, j).recip()
    # sum_{n > cut} n^-j <= cut^(1-j)/(j-1)
    tail = iv.pow_int(Interval(float(cut)), j - 1).recip() / float(j - 1)
    return _euler_product(a, tail)


def tail_bound_sidio(j: int, A: float, m: int, cut: int = DEFAULT_PRIME_CUT) -> Interval:
    """Upper bound for the sum of mu^2(a)/a^j over a >= A coprime to m."""
    if j < 2 or int(j) != j:
        raise ContractError("j must be an integer >= 2")
    if A < 1 or m < 1:
        raise ContractError("need A >= 1 and m >= 1")
    c = zeta_ratio(j, cut) / iv.pow_real(Interval(float(A)), j - 1)
    for p in prime_factors(m):
        c = c / (Interval(1.0) + iv.pow_int(Interval(float(p)), j).recip())
    return c


def c_E(cut: int = DEFAULT_PRIME_CUT) -> Interval:
    """gamma + sum_p log p/(p(p-1)), with a theta-based tail enclosure."""
    p = _primes(cut)
    terms = iv.log(Interval.coerce(p.astype(np.float64))) * _recip_pp1(p)
    # tail: partial summation against theta(t) <= 1.01624 t gives <= 2*1.01624/(cut-1)
    tail = THETA_RATIO * 2.0 / Interval(float(cut - 1))
    return iv.EULER_GAMMA + iv.isum(terms) + Interval(0.0, tail.hi)


@lru_cache(maxsize=1 << 16)
def _f1_factor(p: int) -> Interval:
    pp = Interval(float(p))
    return (1.0 + iv.pow_real(pp, I(-2) / 3)) / (
        1.0 + (iv.cbrt(pp) + iv.cbrt(pp).sqr()) / (pp * (pp - 1.0)))


@lru_cache(maxsize=1 << 16)
def log_over_p(p: int) -> Interval:
    return iv.log(Interval(float(p))) / float(p)


def f1(d: int, ps=None) -> Interval:
    r = Interval(1.0)
    for p in (prime_factors(d) if ps is None else ps):
        r = r * _f1_factor(p)
    return r


def ramare_Gd(d: int, R, cE: Optional[Interval] = None) -> tuple[Interval, Interval]:
    """Main term phi(d)/d (log R + c_E + sum log p/p) and radius 7.284 R^(-1/3) f1(d)."""
    if d < 1 or R < 1:
        raise ContractError("need d >= 1 and R >= 1")
    if cE is None:
        cE = c_E()
    ps = prime_factors(d)
    s = Interval(0.0)
    for p in ps:
        s = s + log_over_p(p)
    ratio = Interval(Fraction(phi_exact(d), d))
    R = Interval.coerce(R)
    est = ratio * (iv.log(R) + cE + s)
    rad = I("7.284") * iv.cbrt(R).recip() * f1(d, ps)
    return est, rad


# convolution identities -----------------------------------------------------

def f_j_prime(p: int, j: int) -> Fraction:
    return Fraction(p ** j - (p - 1) ** j, (p - 1) ** j * p)


def merleau_sides(q: int, j: int) -> tuple[Fraction, Fraction]:
    """Both sides of mu^2(q) q^(j-1)/phi(q)^j = sum_{ab=q} f_j(b)/a, q squarefree."""
    ps = prime_factors(q)
    lhs = Fraction(q ** (j - 1), phi_exact(q) ** j)
    rhs = Fraction(0)
    for mask in range(1 << len(ps)):
        b = 1
        fb = Fraction(1)
        for i, p in enumerate(ps):
            if mask >> i & 1:
                b *= p
                fb *= f_j_prime(p, j)
        rhs += fb / (q // b)
    return lhs, rhs


# closed-form sum bounds ------------------------------------------------------

@dataclass
class SumCheck:
    label: str
    bound: Interval
    exact: Optional[Interval]
    passed: bool
    note: str = ""


def gat1_constants(cut: int = DEFAULT_PRIME_CUT) -> dict:
    """(15/pi^2) prod (1+f_2(p)) and (12/pi^2) prod_{p>2} (1+f_2(p))."""
    p = _primes(cut).astype(np.float64)
    P = Interval.coerce(p)
    f2 = (2.0 * P - 1.0) / ((P - 1.0).sqr() * P)
    # f_2(p) <= 2/(p-1)^2 <= 2/((n-1)(n-2)), telescoping to 2/(cut-1)
    tail = Interval(2.0) / Interval(float(cut - 1))
    odd = _euler_product(f2[1:], tail)
    two = Interval(1.0) + f2[0]
    z = zeta_ratio(2, cut)
    return {"gat1": z * two * odd, "gat1o": z / I(Fraction(5, 4)) * odd}


def phi_sq_tail(r: int, tables: MultTables, parity: Optional[str] = None,
                cut: int = DEFAULT_PRIME_CUT) -> Interval:
    """Enclosure of sum_{q >= r} mu^2/phi^2: exact head to the table limit plus a sidio tail."""
    N = tables.limit
    q = np.arange(N + 1)
    keep = (tables.mu_sq == 1) & (q >= r)
    keep[0] = False
    if parity == "odd":
        keep &= (q % 2 == 1)
    elif parity == "even":
        keep &= (q % 2 == 0)
    ph = tables.phi.astype(np.float64)
    ph[0] = 1.0
    P = Interval.coerce(ph[keep])
    head = iv.isum(P.sqr().recip())
    consts = gat1_constants(cut)
    if parity is None:
        tail = consts["gat1"] / float(N + 1)
    elif parity == "odd":
        tail = consts["gat1o"] / float(N + 1)
    else:
        tail = consts["gat1o"] / float((N + 1) / 2.0)
    return head + Interval(0.0, tail.hi)


def phi_sum_bounds(r: int, tables: MultTables, cut: int = DEFAULT_PRIME_CUT) -> list[SumCheck]:
    if r > tables.limit:
        raise ContractError("r beyond table limit")
    consts = gat1_constants(cut)
    out = []
    c1 = consts["gat1"]
    out.append(SumCheck("gat1_constant", c1, None, c1.hi <= 6.7345, "<= 6.7345"))
    c1o = consts["gat1o"]
    out.append(SumCheck("gat1o_constant", c1o, None, c1o.hi <= 2.15502, "<= 2.15502"))
    out.append(SumCheck("gat1e_constant", c1o * 2.0, None, (c1o * 2.0).hi <= 4.31004, "<= 4.31004"))
    R = float(r)
    for label, par, const in (("gat1", None, "6.7345"), ("gat1o", "odd", "2.15502"),
                              ("gat1e", "even", "4.31004")):
        b = I(const) / R
        ex = phi_sq_tail(r, tables, par, cut)
        out.append(SumCheck(label, b, ex, ex.hi <= b.lo))
    # mu^2(q) q/phi(q) over odd q <= r
    q = np.arange(r + 1)
    keep = (tables.mu_sq[: r + 1] == 1) & (q % 2 == 1)
    qq = Interval.coerce(q[keep].astype(np.float64))
    pp = Interval.coerce(tables.phi[: r + 1][keep].astype(np.float64))
    ex = iv.isum(qq / pp)
    b = I("0.64787") * R + iv.log(Interval(R)) / 4.0 + I("0.425")
    out.append(SumCheck("gatosbuenos", b, ex, ex.hi <= b.lo))
    if r >= 195:
        ex = odd_squarefree_sum(r, tables)
        half = iv.log(Interval(R)) * 0.5
        lo_b, hi_b = half + I("0.83"), half + I("0.85")
        out.append(SumCheck("marmo", Interval(lo_b.lo, hi_b.hi), ex,
                            ex.lo >= lo_b.hi and ex.hi <= hi_b.lo))
    return out


def verify_marmo(r_max: int, tables: MultTables) -> ProofOutcome:
    """(1/2)log r + 0.83 <= odd sum <= (1/2)log r + 0.85 for integer r in [195, r_max]."""
    tab = GTable.build(2, r_max, tables)
    n = np.arange(195, r_max + 1, dtype=np.int64)
    g = tab.values(n)
    half = iv.log(Interval.coerce(n.astype(np.float64))) * 0.5
    ok = (g.lo >= (half + I("0.83")).hi) & (g.hi <= (half + I("0.85")).lo)
    bad = np.flatnonzero(~ok)
    if bad.size:
        return ProofOutcome("unproven", 0, Interval(float(n[bad[0]])), int(n.size), "marmo")
    return ProofOutcome("proven", 0, None, int(n.size), "marmo")
