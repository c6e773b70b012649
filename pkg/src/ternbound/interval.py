"""Outward-rounded interval arithmetic.

Endpoints are float64 scalars or numpy arrays of equal shape; every
operation works elementwise on either, so an array-valued Interval is a
batch of independent enclosures (used heavily by quadrature and scans).

Rounding is emulated: each native result is stepped outward with
``nextafter``.  Elementary functions come from libm / numpy and are
widened by ``ELEM_ULPS`` steps, which covers their documented error.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

ELEM_ULPS = 8
_INF = math.inf


class DomainError(ValueError):
    pass


def _dn(x, k: int = 1):
    for _ in range(k):
        x = np.nextafter(x, -_INF)
    return x


def _up(x, k: int = 1):
    for _ in range(k):
        x = np.nextafter(x, _INF)
    return x


_nx = math.nextafter


def _scalar(x):
    if isinstance(x, np.ndarray) and x.ndim == 0:
        return float(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _frac_bounds(fr: Fraction) -> tuple[float, float]:
    f = float(fr)
    lo = f if Fraction(f) <= fr else math.nextafter(f, -_INF)
    hi = f if Fraction(f) >= fr else math.nextafter(f, _INF)
    return lo, hi


Number = Union[int, float, Fraction, str, "Interval"]


class Interval:
    """Closed interval [lo, hi]; lo may be -inf and hi may be +inf."""

    __slots__ = ("lo", "hi")
    __array_priority__ = 1000

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if type(lo) is float and type(hi) is float:
            # scalar fast path; NaN fails the comparison
            if not lo <= hi:
                raise ValueError(f"invalid interval [{lo}, {hi}]")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)
            return
        lo = _scalar(lo)
        hi = _scalar(hi)
        if isinstance(lo, (int, Fraction)) or isinstance(hi, (int, Fraction)):
            lo = _frac_bounds(Fraction(lo))[0]
            hi = _frac_bounds(Fraction(hi))[1]
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or not np.all(lo <= hi):
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    # construction -----------------------------------------------------
    @classmethod
    def coerce(cls, x) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            if abs(x) <= 2**53:
                return cls(float(x))
            return cls(*_frac_bounds(Fraction(x)))
        if isinstance(x, Fraction):
            return cls(*_frac_bounds(x))
        if isinstance(x, str):
            return cls(*_frac_bounds(Fraction(x)))
        if isinstance(x, (float, np.floating)):
            return cls(float(x))
        if isinstance(x, np.ndarray):
            x = x.astype(np.float64)
            return cls(x, x.copy())
        raise TypeError(f"cannot make an interval from {type(x).__name__}")

    @classmethod
    def hull_of(cls, *items) -> "Interval":
        ivs = [cls.coerce(v) for v in items]
        return cls(min(v.lo for v in ivs), max(v.hi for v in ivs))

    # basic queries ------------------------------------------------------
    @property
    def is_array(self) -> bool:
        return isinstance(self.lo, np.ndarray)

    def __len__(self):
        if not self.is_array:
            raise TypeError("scalar interval has no length")
        return len(self.lo)

    def __getitem__(self, idx) -> "Interval":
        return Interval(self.lo[idx], self.hi[idx])

    def width(self):
        return _up(self.hi - self.lo)

    def mid(self):
        return 0.5 * self.lo + 0.5 * self.hi

    def rad(self):
        m = self.mid()
        return np.maximum(_up(self.hi - m), _up(m - self.lo))

    def mag(self):
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self):
        return np.where((self.lo <= 0) & (self.hi >= 0), 0.0,
                        np.minimum(np.abs(self.lo), np.abs(self.hi)))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return bool(np.all(self.lo <= x.lo) and np.all(x.hi <= self.hi))
        if isinstance(x, (Fraction, int)) or isinstance(x, str):
            fr = Fraction(x)
            return Fraction(float(self.lo)) <= fr <= Fraction(float(self.hi))
        return bool(np.all(self.lo <= x) and np.all(x <= self.hi))

    def contains_zero(self):
        return (self.lo <= 0) & (self.hi >= 0)

    def hull(self, other) -> "Interval":
        o = Interval.coerce(other)
        return Interval(np.minimum(self.lo, o.lo), np.maximum(self.hi, o.hi))

    def intersect(self, other) -> "Interval":
        o = Interval.coerce(other)
        lo, hi = np.maximum(self.lo, o.lo), np.minimum(self.hi, o.hi)
        if not np.all(lo <= hi):
            raise DomainError("empty intersection")
        return Interval(lo, hi)

    def split(self) -> tuple["Interval", "Interval"]:
        m = self.mid()
        if not (self.lo < m < self.hi):
            m = self.lo if self.lo < self.hi else m
        return Interval(self.lo, m), Interval(m, self.hi)

    # certified comparisons: True only when every point satisfies it ----
    def certainly_lt(self, other) -> bool:
        return bool(np.all(self.hi < Interval.coerce(other).lo))

    def certainly_le(self, other) -> bool:
        return bool(np.all(self.hi <= Interval.coerce(other).lo))

    def certainly_gt(self, other) -> bool:
        return bool(np.all(self.lo > Interval.coerce(other).hi))

    def certainly_ge(self, other) -> bool:
        return bool(np.all(self.lo >= Interval.coerce(other).hi))

    def certainly_pos(self) -> bool:
        return bool(np.all(self.lo > 0))

    # arithmetic ---------------------------------------------------------
    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = Interval.coerce(other)
        if type(self.lo) is float and type(o.lo) is float:
            return Interval(_nx(self.lo + o.lo, -_INF), _nx(self.hi + o.hi, _INF))
        return Interval(_dn(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = Interval.coerce(other)
        if type(self.lo) is float and type(o.lo) is float:
            return Interval(_nx(self.lo - o.hi, -_INF), _nx(self.hi - o.lo, _INF))
        return Interval(_dn(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return Interval.coerce(other) - self

    def __mul__(self, other):
        o = Interval.coerce(other)
        if type(self.lo) is float and type(o.lo) is float:
            ps = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
            ps = [0.0 if p != p else p for p in ps]  # 0*inf
            return Interval(_nx(min(ps), -_INF), _nx(max(ps), _INF))
        with np.errstate(invalid="ignore"):
            ps = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        ps = [np.where(np.isnan(p), 0.0, p) for p in ps]
        lo = np.minimum(np.minimum(ps[0], ps[1]), np.minimum(ps[2], ps[3]))
        hi = np.maximum(np.maximum(ps[0], ps[1]), np.maximum(ps[2], ps[3]))
        return Interval(_dn(lo), _up(hi))

    __rmul__ = __mul__

    def recip(self):
        if np.any(self.contains_zero()):
            raise DomainError("division by an interval containing zero")
        with np.errstate(divide="ignore"):
            return Interval(_dn(1.0 / self.hi), _up(1.0 / self.lo))

    def __truediv__(self, other):
        o = Interval.coerce(other)
        if np.any(o.contains_zero()):
            raise DomainError("division by an interval containing zero")
        if type(self.lo) is float and type(o.lo) is float:
            qs = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi]
            qs = [0.0 if q != q else q for q in qs]
            return Interval(_nx(min(qs), -_INF), _nx(max(qs), _INF))
        with np.errstate(invalid="ignore", divide="ignore"):
            qs = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi]
        qs = [np.where(np.isnan(q), 0.0, q) for q in qs]
        lo = np.minimum(np.minimum(qs[0], qs[1]), np.minimum(qs[2], qs[3]))
        hi = np.maximum(np.maximum(qs[0], qs[1]), np.maximum(qs[2], qs[3]))
        return Interval(_dn(lo), _up(hi))

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)):
            return pow_int(self, int(n))
        return pow_real(self, n)

    def sqr(self):
        return pow_int(self, 2)

    def __abs__(self):
        return Interval(self.mig(), self.mag())

    def __repr__(self):
        if self.is_array:
            return f"Interval(<array of {len(self.lo)}>)"
        return f"[{self.lo!r}, {self.hi!r}]"

    def __format__(self, spec):
        if not spec:
            return repr(self)
        return f"[{format(self.lo, spec)}, {format(self.hi, spec)}]"

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return bool(np.all(self.lo == other.lo) and np.all(self.hi == other.hi))

    def __hash__(self):
        return hash((float(self.lo), float(self.hi))) if not self.is_array else id(self)


I = Interval.coerce


def pm(radius) -> Interval:
    """The symmetric interval [-R, R], i.e. a quantity at most R in size."""
    r = Interval.coerce(radius).mag()
    return Interval(-r, r)


def point_plus_minus(center, radius) -> Interval:
    return Interval.coerce(center) + pm(radius)


def _pow_nonneg(x: Interval, n: int) -> Interval:
    lo = np.ones_like(x.lo) if x.is_array else 1.0
    hi = lo
    blo, bhi = x.lo, x.hi
    while n:
        if n & 1:
            lo, hi = np.maximum(_dn(lo * blo), 0.0), _up(hi * bhi)
        n >>= 1
        if n:
            blo, bhi = np.maximum(_dn(blo * blo), 0.0), _up(bhi * bhi)
    return Interval(_scalar(lo), _scalar(hi))


def pow_int(a, n: int) -> Interval:
    a = Interval.coerce(a)
    if n < 0:
        return pow_int(a, -n).recip()
    if n % 2 == 0:
        return _pow_nonneg(abs(a), n)
    # odd powers are increasing: treat each endpoint separately
    lo_abs = _pow_nonneg(Interval(np.abs(a.lo)), n)
    hi_abs = _pow_nonneg(Interval(np.abs(a.hi)), n)
    lo = np.where(a.lo >= 0, lo_abs.lo, -lo_abs.hi)
    hi = np.where(a.hi >= 0, hi_abs.hi, -hi_abs.lo)
    return Interval(_scalar(lo), _scalar(hi))


# elementary functions ----------------------------------------------------

def _widen(lo, hi, k: int = ELEM_ULPS) -> Interval:
    return Interval(_dn(lo, k), _up(hi, k))


def exp(a) -> Interval:
    a = Interval.coerce(a)
    with np.errstate(over="ignore"):
        r = _widen(np.exp(a.lo), np.exp(a.hi))
    return Interval(np.maximum(r.lo, 0.0), r.hi)


def log(a) -> Interval:
    a = Interval.coerce(a)
    if not np.all(a.lo > 0):
        raise DomainError("log of an interval not contained in (0, inf)")
    return _widen(np.log(a.lo), np.log(a.hi))


def log1p(a) -> Interval:
    a = Interval.coerce(a)
    if not np.all(a.lo > -1):
        raise DomainError("log1p domain")
    return _widen(np.log1p(a.lo), np.log1p(a.hi))


def sqrt(a) -> Interval:
    a = Interval.coerce(a)
    if not np.all(a.lo >= 0):
        raise DomainError("sqrt of an interval with negative part")
    return Interval(np.maximum(_dn(np.sqrt(a.lo)), 0.0), _up(np.sqrt(a.hi)))


def log_log(a) -> Interval:
    a = Interval.coerce(a)
    if not np.all(a.lo > 1):
        raise DomainError("log log needs a > 1")
    return log(log(a))


def pow_real(a, p) -> Interval:
    """a**p for real p; requires a > 0, or a >= 0 with p > 0."""
    a = Interval.coerce(a)
    p = Interval.coerce(p)
    if np.all(a.lo > 0):
        return exp(p * log(a))
    if np.all(a.lo >= 0) and np.all(p.lo > 0):
        safe = Interval(np.maximum(a.lo, 5e-324), np.maximum(a.hi, 5e-324))
        r = exp(p * log(safe))
        return Interval(np.where(a.lo == 0, 0.0, r.lo), r.hi)
    raise DomainError("real power of an interval that reaches zero or below")


def cbrt(a) -> Interval:
    a = Interval.coerce(a)
    return _widen(np.cbrt(a.lo), np.cbrt(a.hi))


def atan(a) -> Interval:
    a = Interval.coerce(a)
    return _widen(np.arctan(a.lo), np.arctan(a.hi))


_TWO_PI = 2 * math.pi


def _has_point(lo, hi, offset):
    # is offset + 2*pi*k inside [lo, hi] for some k? errs toward True
    slack = 1e-12 * (1.0 + np.maximum(np.abs(lo), np.abs(hi)))
    k_lo = np.ceil((lo - slack - offset) / _TWO_PI)
    k_hi = np.floor((hi + slack - offset) / _TWO_PI)
    return k_lo <= k_hi


def sin(a) -> Interval:
    a = Interval.coerce(a)
    e = _widen(np.minimum(np.sin(a.lo), np.sin(a.hi)), np.maximum(np.sin(a.lo), np.sin(a.hi)))
    wide = (a.hi - a.lo) >= _TWO_PI
    hi = np.where(wide | _has_point(a.lo, a.hi, math.pi / 2), 1.0, np.minimum(e.hi, 1.0))
    lo = np.where(wide | _has_point(a.lo, a.hi, -math.pi / 2), -1.0, np.maximum(e.lo, -1.0))
    return Interval(_scalar(lo), _scalar(hi))


def cos(a) -> Interval:
    a = Interval.coerce(a)
    e = _widen(np.minimum(np.cos(a.lo), np.cos(a.hi)), np.maximum(np.cos(a.lo), np.cos(a.hi)))
    wide = (a.hi - a.lo) >= _TWO_PI
    hi = np.where(wide | _has_point(a.lo, a.hi, 0.0), 1.0, np.minimum(e.hi, 1.0))
    lo = np.where(wide | _has_point(a.lo, a.hi, math.pi), -1.0, np.maximum(e.lo, -1.0))
    return Interval(_scalar(lo), _scalar(hi))


def maximum(a, b) -> Interval:
    a, b = Interval.coerce(a), Interval.coerce(b)
    return Interval(np.maximum(a.lo, b.lo), np.maximum(a.hi, b.hi))


def minimum(a, b) -> Interval:
    a, b = Interval.coerce(a), Interval.coerce(b)
    return Interval(np.minimum(a.lo, b.lo), np.minimum(a.hi, b.hi))


def isum(a: Interval) -> Interval:
    """Enclosure of the sum of an array-valued interval."""
    return Interval(_dn(math.fsum(np.ravel(a.lo))), _up(math.fsum(np.ravel(a.hi))))


def ivl_arith(op: str, a, b) -> Interval:
    a = Interval.coerce(a)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow_int":
        return pow_int(a, int(b))
    raise ValueError(f"unknown op {op!r}")


_ELEM = {"exp": exp, "log": log, "sqrt": sqrt, "sin": sin, "cos": cos, "log_log": log_log}


def ivl_elem(fn: str, a, p=None) -> Interval:
    if fn == "pow_real":
        return pow_real(a, p)
    try:
        return _ELEM[fn](a)
    except KeyError:
        raise ValueError(f"unknown function {fn!r}") from None


# constants (decimal expansions far beyond double precision) ------------
PI = I("3.14159265358979323846264338327950288419716939937510")
E = I("2.71828182845904523536028747135266249775724709369995")
EULER_GAMMA = I("0.57721566490153286060651209008240243104215933593992")
LOG2 = I("0.69314718055994530941723212145817656807550013436025")
SQRT_HALF_PI = I("1.25331413731550025120788264240552262650349337030496")
E_GAMMA = I("1.78107241799019798523650410310717954916964521430343")


def dec(s: str) -> Interval:
    """Tight enclosure of a decimal literal."""
    return I(s)


# bisection prover ---------------------------------------------------------

Box = Union[Interval, Sequence[Interval]]


@dataclass(frozen=True)
class ProofOutcome:
    status: str
    max_depth_used: int
    failure_box: Optional[Box] = None
    boxes: int = 0
    label: str = ""

    @property
    def proven(self) -> bool:
        return self.status == "proven"


def _split_box(box: Box):
    if isinstance(box, Interval):
        return box.split()
    widths = [float(b.hi - b.lo) for b in box]
    k = int(np.argmax(widths))
    left, right = box[k].split()
    return (tuple(box[:k]) + (left,) + tuple(box[k + 1:]),
            tuple(box[:k]) + (right,) + tuple(box[k + 1:]))


def _certified(predicate, box) -> bool:
    try:
        return bool(predicate(box))
    except (DomainError, ZeroDivisionError, OverflowError, FloatingPointError):
        return False


def bisect_prove(predicate: Callable[[Box], bool], domain: Box, max_depth: int,
                 initial_splits: int = 0, max_boxes: int = 5_000_000,
                 label: str = "") -> ProofOutcome:
    """Certify ``predicate`` on ``domain`` by recursive midpoint splitting.

    The predicate must be sound: returning True for a box means the property
    holds at every point of it.  Boxes deeper than ``max_depth`` that still
    fail stop the search and are reported as the failure box.
    """
    if isinstance(domain, (list, tuple)):
        domain = tuple(domain)
    stack = [(domain, 0)]
    for _ in range(initial_splits):
        stack = [(c, d + 1) for b, d in stack for c in _split_box(b)]
    stack.reverse()
    deepest = 0
    evaluated = 0
    while stack:
        box, depth = stack.pop()
        evaluated += 1
        deepest = max(deepest, depth)
        if _certified(predicate, box):
            continue
        if depth >= max_depth or evaluated >= max_boxes:
            return ProofOutcome("unproven", deepest, box, evaluated, label)
        a, b = _split_box(box)
        stack.append((b, depth + 1))
        stack.append((a, depth + 1))
    return ProofOutcome("proven", deepest, None, evaluated, label)


def enclose_max(f: Callable[[Interval], Interval], domain: Interval, tol: float = 1e-10,
                max_evals: int = 200_000, df: Optional[Callable] = None) -> Interval:
    """Branch-and-bound enclosure of sup f over the domain.

    Always refines the box with the largest upper bound; stops once that
    bound is within ``tol`` of the best certified point value.  With ``df``
    the mean-value form f(m) + f'(box)(box - m) tightens each box bound.
    """
    def upper(box: Interval) -> float:
        hi = f(box).hi
        if df is not None:
            m = Interval(box.mid())
            hi = min(hi, (f(m) + df(box) * (box - m)).hi)
        return hi

    best_lo = f(Interval(domain.mid())).lo
    heap = [(-upper(domain), 0, domain)]
    count = 1
    while heap:
        neg_hi, _, box = heap[0]
        if -neg_hi - best_lo <= tol or count >= max_evals:
            break
        heapq.heappop(heap)
        for child in box.split():
            count += 1
            best_lo = max(best_lo, f(Interval(child.mid())).lo)
            hi = upper(child)
            if hi >= best_lo:
                heapq.heappush(heap, (-hi, count, child))
    top = -heap[0][0] if heap else best_lo
    return Interval(best_lo, max(top, best_lo))


# quadrature -------------------------------------------------------------

@dataclass(frozen=True)
class QuadResult:
    value: Interval
    met_tol: bool
    panels: int


def _panel_enclosure(f, df, d2f, edges: np.ndarray) -> Interval:
    u, v = edges[:-1], edges[1:]
    box = Interval(u, v)
    h = Interval(v) - Interval(u)
    if df is None and d2f is None:
        return h * f(box)
    c = (Interval(u) + Interval(v)) * 0.5
    main = h * f(c)
    if d2f is not None:
        return main + pow_int(h, 3) * d2f(box) * (1.0 / 24.0)
    # f(c+s) + f(c-s) - 2f(c) = s (f'(a) - f'(b)) with a, b in the panel
    d = df(box)
    return main + h.sqr() * (d - d) * 0.125


def integrate_enclose(f: Callable[[Interval], Interval], a: float, b: float, tol: float = 1e-9,
                      df: Optional[Callable] = None, d2f: Optional[Callable] = None,
                      tail: Optional[tuple[float, Interval]] = None,
                      panels: int = 2**14, max_panels: int = 2**22) -> QuadResult:
    """Enclose the integral of f over [a, b].

    The integrand is evaluated on whole batches of panels at once.  With no
    derivative the panel range enclosure is used; ``df`` enables the
    midpoint rule with a remainder driven by the spread of f' on a panel, ``d2f`` the midpoint rule
    with its second-order remainder.  For b = inf, ``tail=(c, T)`` splits
    the integral at c and T must enclose the integral over [c, inf).
    """
    extra = Interval(0.0)
    if math.isinf(b):
        if tail is None:
            raise ValueError("an infinite endpoint needs a tail bound")
        b, extra = tail[0], Interval.coerce(tail[1])
    if b < a:
        raise ValueError("need a <= b")
    n = panels
    while True:
        edges = np.linspace(a, b, n + 1)
        edges[0], edges[-1] = a, b
        total = isum(_panel_enclosure(f, df, d2f, edges)) + extra
        met = float(total.hi - total.lo) <= tol
        if met or n * 4 > max_panels:
            return QuadResult(total, met, n)
        n *= 4
