"""Explicit-formula bounds for sums of Lambda(n) eta2(n/x), their direct
verification for x <= 2000, and the ladder from verified prime gaps to the
range of odd n known to be sums of three primes.

For x > 0 the weight eta2(n/x) is 4 log(4n/x) on [x/4, x/2] and
4 log(x/n) on [x/2, x], so the sum equals

    4 [ log(x) A(x) - B(x) + log(4) C(x) ]

with A = psi(x) - 2 psi(x/2) + psi(x/4), C = psi(x/2) - psi(x/4) and B the
same combination as A of sum_{n <= y} Lambda(n) log(n).  All of these only
depend on floor(x), floor(x/2), floor(x/4), hence on floor(x) alone.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from . import interval as iv
from .interval import Interval, ProofOutcome, I
from .arithfn import primes_up_to
from .smoothing import eta2_eval

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
DEFAULT_T0 = 3.061e10
EPS_T0 = I("2.73e-10")
AUSTERIA_SQRT = I("0.2")
AUSTERIA_LINEAR = I("1.04488")
ETA2_LIP = 16.0
GRID = 1000  # grid spacing 1/GRID
CREPE_SQRT_STATED = I("0.135")
CREPE_INV_SQ_STATED = I("9.7")


class ContractError(ValueError):
    pass


@dataclass(frozen=True)
class ZeroHypothesis:
    """All nontrivial zeros with |Im s| <= T0 lie on the critical line."""
    T0: float = DEFAULT_T0
    kappa_m: tuple = (I("0.0463"), I("0.00167"), I("0.0000744"))

    def __post_init__(self):
        if not self.T0 > 2 * math.pi * math.e:
            raise ContractError("need T0 > 2 pi e")

    @property
    def T0_iv(self) -> Interval:
        return I(repr(float(self.T0)))

    @property
    def log_eT0(self) -> Interval:
        """log(e T0 / 2 pi)."""
        return iv.log(self.T0_iv / (iv.PI * 2.0)) + 1.0


def zero_sum_bound(m: int, x, hyp: Optional[ZeroHypothesis] = None) -> Interval:
    """Upper bound for |sum_rho x^rho / rho^(m+1)|."""
    if m not in (1, 2, 3):
        raise ValueError("m must be 1, 2 or 3")
    h = hyp or ZeroHypothesis()
    x = Interval.coerce(x)
    if not x.lo >= 1:
        raise ContractError("need x >= 1")
    T = h.T0_iv
    coef = Interval(1.0) / (iv.PI * (2.0 * m) * iv.pow_int(T, m)) + I("2.68") / iv.pow_int(T, m + 1)
    return Interval(0.0, (coef * x * h.log_eT0 + h.kappa_m[m - 1] * iv.sqrt(x)).hi)


def zero_sum_eta2(x, hyp: Optional[ZeroHypothesis] = None) -> Interval:
    """|S_1(x) - 2 S_1(x/2) + S_1(x/4)| bound, the zero contribution for eta2."""
    h = hyp or ZeroHypothesis()
    x = Interval.coerce(x)
    T = h.T0_iv
    coef = Interval(1.0) / (iv.PI * 2.0 * T) + I("2.68") / T.sqr()
    sq = (Interval(1.5) + iv.sqrt(Interval(2.0))) * h.kappa_m[0]
    return Interval(0.0, (coef * x * 2.25 * h.log_eT0 + sq * iv.sqrt(x)).hi)


@lru_cache(maxsize=1)
def eta2_inverse_cubic_integral() -> Interval:
    """Integral over [1/4, 1] of eta2(t) / (t (t^2 - 1/100))."""
    def w(t):
        return Interval(1.0) / (t * (t.sqr() - 0.01))

    def dw(t):
        d = t * (t.sqr() - 0.01)
        return -(t.sqr() * 3.0 - 0.01) / d.sqr()

    def left(t):
        return iv.log(t * 4.0) * 4.0 * w(t)

    def dleft(t):
        return (Interval(4.0) / t) * w(t) + iv.log(t * 4.0) * 4.0 * dw(t)

    def right(t):
        return -iv.log(t) * 4.0 * w(t)

    def dright(t):
        return (Interval(-4.0) / t) * w(t) - iv.log(t) * 4.0 * dw(t)
    a = iv.integrate_enclose(left, 0.25, 0.5, tol=1e-7, df=dleft).value
    b = iv.integrate_enclose(right, 0.5, 1.0, tol=1e-7, df=dright).value
    return a + b


def crepe_epsilon(hyp: Optional[ZeroHypothesis] = None) -> Interval:
    """The relative error log(e T0/2pi)/T0 ((9/4)/(2 pi) + 6.03/T0)."""
    h = hyp or ZeroHypothesis()
    T = h.T0_iv
    return Interval(0.0, (h.log_eT0 / T * (I(9) / 4 / (iv.PI * 2.0) + I("6.03") / T)).hi)


def crepe_estimate(x, hyp: Optional[ZeroHypothesis] = None) -> dict:
    """Sum Lambda(n) eta2(n/x) = x + O*(c x^(1/2) + d/x^2) + O*(eps) x for x >= 10.

    ``main`` encloses the sum; ``eps`` is the relative term.
    """
    h = hyp or ZeroHypothesis()
    x = Interval.coerce(x)
    if not x.lo >= 10:
        raise ContractError("need x >= 10")
    eps = crepe_epsilon(h)
    sq = Interval(0.0, ((Interval(1.5) + iv.sqrt(Interval(2.0))) * h.kappa_m[0]).hi)
    d = eta2_inverse_cubic_integral()
    err = sq * iv.sqrt(x) + d / x.sqr()
    total_err = Interval(0.0, (err + eps * x).hi)
    return {"main": x + iv.pm(total_err.hi), "eps": eps, "sqrt_coef": sq, "inv_sq_coef": d,
            "abs_err": total_err,
            "sqrt_slack": CREPE_SQRT_STATED - sq, "inv_sq_slack": CREPE_INV_SQ_STATED - d}


# direct evaluation for small x -------------------------------------------

@dataclass(frozen=True)
class _Cumulative:
    psi: Interval   # psi(n) for n = 0..N
    lg: Interval    # sum_{m <= n} Lambda(m) log m


@lru_cache(maxsize=4)
def _cumulative(N: int) -> _Cumulative:
    lam_lo = np.zeros(N + 1)
    lam_hi = np.zeros(N + 1)
    lg_lo = np.zeros(N + 1)
    lg_hi = np.zeros(N + 1)
    for p in primes_up_to(N):
        lp = iv.log(Interval(float(p)))
        q, k = int(p), 1
        while q <= N:
            t = lp * float(k) * lp
            lam_lo[q], lam_hi[q] = lp.lo, lp.hi
            lg_lo[q], lg_hi[q] = t.lo, t.hi
            q *= int(p)
            k += 1
    # running sums with outward rounding
    ps_lo, ps_hi, ls_lo, ls_hi = (np.zeros(N + 1) for _ in range(4))
    a = b = Interval(0.0)
    for n in range(1, N + 1):
        if lam_hi[n] > 0:
            a = a + Interval(lam_lo[n], lam_hi[n])
            b = b + Interval(lg_lo[n], lg_hi[n])
        ps_lo[n], ps_hi[n], ls_lo[n], ls_hi[n] = a.lo, a.hi, b.lo, b.hi
    return _Cumulative(Interval(ps_lo, ps_hi), Interval(ls_lo, ls_hi))


def _abc(fl: np.ndarray, cum: _Cumulative):
    f2, f4 = fl // 2, fl // 4
    psi, lg = cum.psi, cum.lg
    A = psi[fl] - psi[f2] * 2.0 + psi[f4]
    B = lg[fl] - lg[f2] * 2.0 + lg[f4]
    C = psi[f2] - psi[f4]
    return A, B, C


def _closed_form(logx: Interval, A: Interval, B: Interval, C: Interval) -> Interval:
    return (logx * A - B + iv.LOG2 * 2.0 * C) * 4.0


def eta2_prime_sum(x) -> Interval:
    """Enclosure of sum_n Lambda(n) eta2(n/x) for real x >= 1 (read as its decimal value)."""
    fx = Fraction(repr(float(x))) if isinstance(x, float) else Fraction(x)
    if fx < 1:
        return Interval(0.0)
    fl = int(math.floor(fx))
    cum = _cumulative(max(fl, 4))
    A, B, C = _abc(np.array([fl]), cum)
    val = _closed_form(iv.log(Interval.coerce(fx)), A, B, C)
    return val[0]


def eta2_prime_sum_direct(x) -> Interval:
    """The same sum term by term (slow; an independent route for checks)."""
    fx = Fraction(repr(float(x))) if isinstance(x, float) else Fraction(x)
    xv = Interval.coerce(fx)
    total = Interval(0.0)
    for p in primes_up_to(int(math.floor(fx))):
        lp = iv.log(Interval(float(p)))
        q = int(p)
        while q <= fx:
            if 4 * q > fx:
                total = total + lp * eta2_eval(Interval(float(q)) / xv)
            q *= int(p)
    return total


def _targets(x: Interval, eps: Interval) -> tuple:
    first = x * (eps + 1.0) + AUSTERIA_SQRT * iv.sqrt(x)
    second = AUSTERIA_LINEAR * x
    return first, second


def _segment_prove(k: int, which: int, eps: Interval, cum: _Cumulative,
                   depth: int = 40) -> ProofOutcome:
    """Prove the bound on [k, k+1] where the set of prime powers is fixed."""
    A, B, C = (v[0] for v in _abc(np.array([k]), cum))

    def f(X):
        S = _closed_form(iv.log(X), A, B, C)
        t = _targets(X, eps)[which]
        return S - t

    def df(X):
        dS = A * 4.0 / X
        if which == 0:
            return dS - (eps + 1.0) - AUSTERIA_SQRT * 0.5 / iv.sqrt(X)
        return dS - AUSTERIA_LINEAR

    def pred(X):
        m = Interval(X.mid())
        return min(f(X).hi, (f(m) + df(X) * (X - m)).hi) <= 0.0
    dom = Interval(float(max(k, 1)), float(k + 1))
    return iv.bisect_prove(pred, dom, depth, label=f"segment [{k},{k+1}] bound {which + 1}")


@dataclass
class AusteriaReport:
    outcome: ProofOutcome
    grid_points: int
    grid_failures: tuple      # counts of failing grid cells per bound
    segments: dict            # bound index -> list of integer k with [k, k+1] done by derivatives
    windows: dict             # bound index -> hull of the failing cells
    max_ratio: float          # max of S(x)/x over the grid


def austeria_check(x_max: float = 2000.0, eps: Interval = EPS_T0, grid: int = GRID,
                   chunk: int = 250_000, slack_mode: str = "cell") -> AusteriaReport:
    """Prove sum Lambda(n) eta2(n/x) <= min((1+eps)x + 0.2 x^(1/2), 1.04488 x) for 1 <= x <= x_max.

    On each grid cell the sum moves by at most 16 times the spacing/2 times a
    weight: with ``slack_mode="cell"`` the weight is the exact sum of Lambda(n)
    over the cell's support divided by x; with ``"proof"`` it is the cruder
    x/(1 - spacing/2) from sum_{x/4 <= n <= x} Lambda(n) <= x.  Cells the grid
    cannot settle are redone on their integer segments, where the prime powers
    in play are fixed and the closed form is bisected with its derivative.
    """
    if slack_mode not in ("cell", "proof"):
        raise ValueError("slack_mode is 'cell' or 'proof'")
    if x_max > 2000:
        raise ContractError("x_max above 2000 is covered by the explicit formula")
    if x_max < 1:
        raise ContractError("need x_max >= 1")
    kmax = int(math.ceil(x_max * grid))
    cum = _cumulative(int(math.floor(x_max + 1)) + 1)
    half = 0.5 / grid
    fails = {0: [], 1: []}
    npts = 0
    max_ratio = 0.0
    for start in range(grid, kmax + 1, chunk):
        k = np.arange(start, min(start + chunk, kmax + 1), dtype=np.int64)
        npts += len(k)
        xg = Interval.coerce(k.astype(np.float64)) / float(grid)
        A, B, C = _abc(k // grid, cum)
        S = _closed_form(iv.log(xg), A, B, C)
        # cell [xg - 1/(2 grid), xg + 1/(2 grid)]; n ranges over (x_lo/4, x_hi]
        x_lo = xg - half
        x_hi = xg + half
        lam = cum.psi[(2 * k + 1) // (2 * grid)] - cum.psi[(2 * k - 1) // (8 * grid)]
        # |eta2(n/x) - eta2(n/xg)| <= 16 n |x - xg| / (x xg) <= 16 half x_hi / (x_lo xg)
        if slack_mode == "cell":
            slack = lam * (x_hi / (x_lo * xg)) * (ETA2_LIP * half)
        else:
            slack = x_hi * (ETA2_LIP * half / (1.0 - half))
        x_lo1 = Interval(np.maximum(x_lo.lo, 1.0), np.maximum(x_lo.hi, 1.0))
        tg = _targets(x_lo1, eps)
        upper = (S + slack).hi
        max_ratio = max(max_ratio, float(np.max(S.hi / xg.lo)))
        for w in (0, 1):
            bad = upper > tg[w].lo
            fails[w].extend((k[bad]).tolist())
    segments, windows = {}, {}
    for w in (0, 1):
        ks = sorted(set(int(math.floor((kk - 0.5) / grid)) for kk in fails[w])
                    | set(int(math.floor((kk + 0.5) / grid)) for kk in fails[w]))
        ks = [kk for kk in ks if 1 <= kk <= x_max]
        segments[w] = ks
        if fails[w]:
            windows[w] = (min(fails[w]) / grid - half, max(fails[w]) / grid + half)
        for kk in ks:
            out = _segment_prove(kk, w, eps, cum)
            if not out.proven:
                return AusteriaReport(out, npts, (len(fails[0]), len(fails[1])), segments,
                                      windows, max_ratio)
    total = ProofOutcome("proven", 0, None, npts, "austeria")
    return AusteriaReport(total, npts, (len(fails[0]), len(fails[1])), segments, windows,
                          max_ratio)


# ladder -------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaRow:
    log_threshold: Fraction
    delta: int
    citation: str


@dataclass(frozen=True)
class DeltaTable:
    """Rows valid for n - 4 >= exp(log_threshold): every interval [m - m/delta, m] has a prime."""
    rows: tuple
    height: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        th = [r.log_threshold for r in self.rows]
        if any(b <= a for a, b in zip(th, th[1:])):
            raise ContractError("delta rows must have strictly increasing thresholds")
        if any(r.delta <= 0 for r in self.rows):
            raise ContractError("delta must be positive")

    @classmethod
    def load(cls, path: str) -> "DeltaTable":
        rows, height = [], None
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line.startswith("#!height"):
                    height = float(line.split()[1])
                    continue
                if not line or line.startswith("#"):
                    continue
                th, d, cite = line.split(None, 2)
                rows.append(DeltaRow(Fraction(th), int(d), cite))
        return cls(tuple(rows), height, os.path.basename(path))


DELTA_TABLES = {3.061e10: "delta_H3.061e10.txt", 2.419e11: "delta_H2.419e11.txt",
                2.44e12: "delta_H2.44e12.txt"}


def default_table(height: float = DEFAULT_T0) -> DeltaTable:
    if height not in DELTA_TABLES:
        raise ContractError(f"no shipped delta table for height {height}")
    return DeltaTable.load(os.path.join(DATA_DIR, DELTA_TABLES[height]))


@dataclass
class Ladder:
    n0: int
    steps: list    # (log threshold, delta, reach of n - 4)


def ladder_replay(hyp: Optional[ZeroHypothesis] = None, table: Optional[DeltaTable] = None,
                  M: int = 4 * 10**18) -> Ladder:
    """Chain the prime-gap regimes starting from the even Goldbach range M."""
    h = hyp or ZeroHypothesis()
    t = table or default_table(h.T0)
    if t.height is not None and t.height != h.T0:
        raise ContractError(f"delta table is for height {t.height}, hypothesis has {h.T0}")
    M = int(M)
    # every odd n <= M + 3 is already a sum of three primes
    cover = M - 1
    steps = []
    for row in t.rows:
        start = iv.exp(Interval.coerce(row.log_threshold))
        if not start.hi <= cover + 1:
            raise ContractError(f"uncovered range of n - 4: ({cover}, exp({row.log_threshold}))")
        reach = row.delta * (M - 4)
        steps.append((row.log_threshold, row.delta, reach))
        cover = max(cover, reach)
    return Ladder(cover + 4, steps)


def ladder_n0(hyp: Optional[ZeroHypothesis] = None, table: Optional[DeltaTable] = None,
              M: int = 4 * 10**18) -> Interval:
    return Interval.coerce(ladder_replay(hyp, table, M).n0)


def six_figures(n: int) -> str:
    return f"{float(n):.5e}"
