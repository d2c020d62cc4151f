"""Continued fractions with exact arithmetic, convergents, and resonance sets.

Alpha must be exact: a rational p/q, a quadratic irrational (a + b*sqrt(d))/c
given by an integer quadruple, or an explicit partial-quotient list.  Floating
input is rejected outright; the small-denominator phenomena downstream are
catastrophically sensitive to rounding in alpha.

Convergent indexing follows the classical convention

    p_1 = 0, q_1 = 1;  p_2 = 1, q_2 = a_1;
    p_{k+1} = a_k p_k + p_{k-1},  q_{k+1} = a_k q_k + q_{k-1},

so an expansion of depth K carries convergents p_k/q_k for k = 1 .. K+1.

All strict-inequality certification goes through rational interval
enclosures of alpha: the default target width is 2^-256, doubled on demand
up to 2^-4096 before giving up with a precision error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import DomainError, PrecisionError

DEFAULT_BITS = 256
MAX_BITS = 4096


# ---------------------------------------------------------------------------
# Exact alpha representations
# ---------------------------------------------------------------------------

class ExactAlpha:
    """Base class: an exactly represented number in (0, 1)."""

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational interval [lo, hi] containing the value, width <= 2^-bits
        when the representation permits."""
        raise NotImplementedError

    def as_float(self) -> float:
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    @property
    def is_rational(self) -> bool:
        return False


@dataclass(frozen=True)
class ZeroAlpha(ExactAlpha):
    """alpha = 0: the degenerate (identity) rotation.

    Accepted by system builders; continued-fraction expansion rejects it.
    """

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        return (Fraction(0), Fraction(0))

    @property
    def is_rational(self) -> bool:
        return True

    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class RationalAlpha(ExactAlpha):
    value: Fraction

    def __post_init__(self):
        if not 0 < self.value < 1:
            raise DomainError(f"alpha={self.value} outside (0, 1)")

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        return (self.value, self.value)

    @property
    def is_rational(self) -> bool:
        return True

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class QuadraticAlpha(ExactAlpha):
    """(a + b*sqrt(d)) / c with integer a, b, c and d a positive nonsquare."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.c == 0 or self.b == 0:
            raise DomainError("quadratic alpha needs c != 0 and b != 0")
        if self.d <= 1 or math.isqrt(self.d) ** 2 == self.d:
            raise DomainError(f"d={self.d} must be a positive nonsquare")
        lo, hi = self.enclosure(64)
        if not (lo > 0 and hi < 1):
            raise DomainError(f"alpha=({self.a}+{self.b}*sqrt({self.d}))/{self.c} "
                              "outside (0, 1)")

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        # sqrt(d) in [s, s+1] / 2^t with s = isqrt(d * 4^t); widen t until
        # the alpha interval is narrow enough.
        t = bits + abs(self.b).bit_length() + abs(self.c).bit_length() + 8
        target = Fraction(1, 2 ** bits)
        while True:
            s = math.isqrt(self.d << (2 * t))
            r_lo = Fraction(s, 1 << t)
            r_hi = Fraction(s + 1, 1 << t)
            if self.b >= 0:
                lo = Fraction(self.a) + self.b * r_lo
                hi = Fraction(self.a) + self.b * r_hi
            else:
                lo = Fraction(self.a) + self.b * r_hi
                hi = Fraction(self.a) + self.b * r_lo
            if self.c > 0:
                lo, hi = lo / self.c, hi / self.c
            else:
                lo, hi = hi / self.c, lo / self.c
            if hi - lo <= target:
                return (lo, hi)
            t *= 2

    def __str__(self) -> str:
        return f"({self.a}+{self.b}*sqrt({self.d}))/{self.c}"


@dataclass(frozen=True)
class QuotientAlpha(ExactAlpha):
    """A number known only through a finite prefix of partial quotients.

    The true value lies strictly between p_{K+1}/q_{K+1} and
    (p_{K+1}+p_K)/(q_{K+1}+q_K); that interval is the best possible
    enclosure, so precision is limited by the supplied depth.
    """

    quotients: tuple[int, ...]

    def __post_init__(self):
        if not self.quotients:
            raise DomainError("quotient list must be nonempty")
        if any(int(a) < 1 for a in self.quotients):
            raise DomainError("partial quotients must be positive integers")

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        # the prefix pins the value to this interval and no further;
        # certification loops detect when its width is insufficient
        ps, qs = _convergents(self.quotients)
        end1 = Fraction(ps[-1], qs[-1])
        end2 = Fraction(ps[-1] + ps[-2], qs[-1] + qs[-2])
        return (min(end1, end2), max(end1, end2))

    def as_float(self) -> float:
        ps, qs = _convergents(self.quotients)
        return ps[-1] / qs[-1]

    def __str__(self) -> str:
        shown = ",".join(str(a) for a in self.quotients[:8])
        more = ",..." if len(self.quotients) > 8 else ""
        return f"[0;{shown}{more}]"


SQRT2_MINUS_1 = QuadraticAlpha(-1, 1, 1, 2)
GOLDEN = QuadraticAlpha(-1, 1, 2, 5)   # (sqrt(5)-1)/2

AlphaLike = Union[ExactAlpha, Fraction, str, Sequence[int]]


def parse_alpha(spec: AlphaLike) -> ExactAlpha:
    """Accept the exact-alpha formats used by descriptors and the CLI.

    Strings: "sqrt2-1", "golden", "p/q", "quad:a,b,c,d", "quotients:2,17,8".
    A float is rejected with a hint to supply quotients instead.
    """
    if isinstance(spec, ExactAlpha):
        return spec
    if isinstance(spec, bool) or isinstance(spec, float):
        raise DomainError(
            "floating-point alpha rejected (exactness required); pass a "
            "rational 'p/q', a quadratic 'quad:a,b,c,d', or an explicit "
            "'quotients:a1,a2,...' list")
    if isinstance(spec, int):
        if spec == 0:
            return ZeroAlpha()
        raise DomainError(f"integer alpha {spec} outside [0, 1)")
    if isinstance(spec, Fraction):
        return ZeroAlpha() if spec == 0 else RationalAlpha(spec)
    if isinstance(spec, str):
        text = spec.strip().lower()
        if text == "0":
            return ZeroAlpha()
        if text in ("sqrt2-1", "sqrt2m1"):
            return SQRT2_MINUS_1
        if text in ("golden", "(sqrt5-1)/2"):
            return GOLDEN
        if text.startswith("quad:"):
            a, b, c, d = (int(x) for x in text[5:].split(","))
            return QuadraticAlpha(a, b, c, d)
        if text.startswith("quotients:"):
            return QuotientAlpha(tuple(int(x) for x in text[10:].split(",")))
        if "/" in text:
            num, den = text.split("/")
            return RationalAlpha(Fraction(int(num), int(den)))
        raise DomainError(f"unrecognised alpha spec {spec!r}")
    if isinstance(spec, Iterable):
        return QuotientAlpha(tuple(int(a) for a in spec))
    raise DomainError(f"unrecognised alpha spec {spec!r}")


# ---------------------------------------------------------------------------
# Expansion
# ---------------------------------------------------------------------------

def _convergents(quotients: Sequence[int]) -> tuple[list[int], list[int]]:
    ps = [0, 1]
    qs = [1, int(quotients[0])]
    for a in quotients[1:]:
        a = int(a)
        ps.append(a * ps[-1] + ps[-2])
        qs.append(a * qs[-1] + qs[-2])
    return ps, qs


def _cmp_int_vs_root(x: int, b: int, d: int) -> int:
    """Sign of x - b*sqrt(d) via integer arithmetic only."""
    if b >= 0:
        if x < 0:
            return -1
        return (x * x > b * b * d) - (x * x < b * b * d)
    if x >= 0:
        return 1
    return (x * x < b * b * d) - (x * x > b * b * d)


def _floor_quad(a: int, b: int, c: int, d: int) -> int:
    """Exact floor of (a + b*sqrt(d)) / c for integer a, b, c, d."""
    if c < 0:
        a, b, c = -a, -b, -c
    s = math.isqrt(b * b * d)
    if b >= 0:
        lo_num, hi_num = a + s, a + s + 1
    else:
        lo_num, hi_num = a - s - 1, a - s
    m = lo_num // c
    # (a + b*sqrt(d))/c >= m+1  iff  (m+1)c - a <= b*sqrt(d)
    while m + 1 <= hi_num // c and _cmp_int_vs_root((m + 1) * c - a, b, d) <= 0:
        m += 1
    return m


def _expand_quadratic(alpha: QuadraticAlpha, depth: int) -> list[int]:
    a, b, c, d = alpha.a, alpha.b, alpha.c, alpha.d
    quotients = []
    # state xi = (a + b sqrt(d)) / c; for the first step xi = 1/alpha
    a, b, c = c * a, -c * b, a * a - b * b * d   # invert once: 1/alpha
    for _ in range(depth):
        g = math.gcd(math.gcd(abs(a), abs(b)), abs(c))
        if g > 1:
            a, b, c = a // g, b // g, c // g
        q = _floor_quad(a, b, c, d)
        quotients.append(q)
        # xi <- 1/(xi - q):  (a' + b sqrt d)/c with a' = a - q c, inverted
        a2 = a - q * c
        a, b, c = c * a2, -c * b, a2 * a2 - b * b * d
    return quotients


def _expand_rational(value: Fraction, depth: int) -> list[int]:
    quotients = []
    num, den = value.numerator, value.denominator
    # value in (0,1): expansion of [0; a1, a2, ...] via Euclid on den/num
    a, b = den, num
    while b and len(quotients) < depth:
        quotients.append(a // b)
        a, b = b, a % b
    return quotients


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients a_1..a_K plus convergents p_k/q_k for k = 1..K+1."""

    alpha: ExactAlpha
    quotients: tuple[int, ...]
    ps: tuple[int, ...]
    qs: tuple[int, ...]
    finite: bool   # expansion terminated exactly (alpha rational)

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def p(self, k: int) -> int:
        """Numerator p_k, 1-based, defined for k = 1 .. depth+1."""
        return self.ps[k - 1]

    def q(self, k: int) -> int:
        return self.qs[k - 1]

    def a(self, k: int) -> int:
        """Partial quotient a_k, 1-based."""
        return self.quotients[k - 1]


def expand(alpha: AlphaLike, depth: int) -> ContinuedFraction:
    """Expand alpha to (at most) `depth` partial quotients.

    Rational alpha terminates early and is flagged finite; the terminal
    convergent then equals alpha exactly.
    """
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    alpha = parse_alpha(alpha)
    if isinstance(alpha, ZeroAlpha):
        raise DomainError("alpha = 0 has no continued-fraction expansion here")

    if isinstance(alpha, RationalAlpha):
        quotients = _expand_rational(alpha.value, depth)
        ps, qs = _convergents(quotients)
        finite = Fraction(ps[-1], qs[-1]) == alpha.value
    elif isinstance(alpha, QuadraticAlpha):
        quotients = _expand_quadratic(alpha, depth)
        ps, qs = _convergents(quotients)
        finite = False
    else:
        assert isinstance(alpha, QuotientAlpha)
        quotients = list(alpha.quotients[:depth])
        ps, qs = _convergents(quotients)
        finite = False

    cf = ContinuedFraction(alpha=alpha, quotients=tuple(quotients),
                           ps=tuple(ps), qs=tuple(qs), finite=finite)
    _check_determinants(cf)
    return cf


def _check_determinants(cf: ContinuedFraction) -> None:
    for k in range(1, cf.depth + 1):
        det = cf.p(k + 1) * cf.q(k) - cf.p(k) * cf.q(k + 1)
        if abs(det) != 1:
            raise AssertionError(f"convergent determinant {det} at k={k}")


# ---------------------------------------------------------------------------
# Certified circle norms ||m alpha||
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _enclosure_cached(alpha: ExactAlpha, bits: int) -> tuple[Fraction, Fraction]:
    # ExactAlpha instances are frozen dataclasses, hence hashable
    return alpha.enclosure(bits)


def centered_fractional(alpha: ExactAlpha, m: int,
                        bits: int = DEFAULT_BITS) -> Fraction:
    """m*alpha mod 1, reduced to [-1/2, 1/2), as an exact rational.

    The result inherits the enclosure width (~2^-bits) around the true
    value; the reduction is centered so that values near an integer come
    out tiny instead of as 1 - tiny.
    """
    if m == 0:
        return Fraction(0)
    b = bits
    while True:
        lo, hi = _enclosure_cached(alpha, b)
        x_lo, x_hi = m * lo, m * hi
        if x_lo > x_hi:
            x_lo, x_hi = x_hi, x_lo
        mid = (x_lo + x_hi) / 2
        r = (mid + Fraction(1, 2)).__floor__()
        t_lo, t_hi = x_lo - r, x_hi - r
        if Fraction(-1, 2) <= t_lo and t_hi < Fraction(1, 2):
            return (t_lo + t_hi) / 2
        if t_hi - t_lo < Fraction(1, 4):
            # interval straddles +-1/2: fine, pick the midpoint representative
            t = (t_lo + t_hi) / 2
            while t >= Fraction(1, 2):
                t -= 1
            while t < Fraction(-1, 2):
                t += 1
            return t
        if b >= MAX_BITS:
            raise PrecisionError(
                f"cannot reduce {m}*alpha mod 1 at {MAX_BITS} bits")
        b *= 2


def circle_norm_interval(alpha: ExactAlpha, m: int,
                         bits: int = DEFAULT_BITS) -> tuple[Fraction, Fraction]:
    """Certified interval for ||m*alpha|| (distance to nearest integer)."""
    if m == 0:
        return (Fraction(0), Fraction(0))
    b = bits
    while True:
        lo, hi = _enclosure_cached(alpha, b)
        x_lo, x_hi = m * lo, m * hi
        if x_lo > x_hi:
            x_lo, x_hi = x_hi, x_lo
        r = ((x_lo + x_hi) / 2 + Fraction(1, 2)).__floor__()
        t_lo, t_hi = x_lo - r, x_hi - r
        if Fraction(-1, 2) <= t_lo and t_hi <= Fraction(1, 2):
            if t_lo <= 0 <= t_hi:
                return (Fraction(0), max(-t_lo, t_hi))
            mags = sorted((abs(t_lo), abs(t_hi)))
            return (mags[0], mags[1])
        if b >= MAX_BITS:
            raise PrecisionError(
                f"cannot certify ||{m}*alpha|| at {MAX_BITS} bits")
        b *= 2


@dataclass(frozen=True)
class ApproxRow:
    """One row of the best-approximation report for index k."""

    k: int
    norm_lo: float
    norm_hi: float
    lower_bound: Fraction    # 1/(q_{k+1}+q_k)
    upper_bound: Fraction    # 1/q_{k+1}
    certified: bool          # both strict inequalities certified
    boundary: bool           # k = 1 rows sit at the bound's boundary


def best_approx_check(cf: ContinuedFraction,
                      bits: int = DEFAULT_BITS) -> list[ApproxRow]:
    """Check 1/(q_{k+1}+q_k) < ||q_k alpha|| < 1/q_{k+1} for each k.

    For a finite (rational) expansion the terminal index is excluded:
    there ||q_K alpha|| equals 1/q_{K+1} exactly.  A quotient-prefix alpha
    likewise stops one index early, where its enclosure runs out of
    information.  The k = 1 row can sit on the lower bound's boundary
    (golden-ratio-type alpha) and is flagged rather than certified.
    """
    rows = []
    top = cf.depth - 1 if (cf.finite or isinstance(cf.alpha, QuotientAlpha)) \
        else cf.depth
    for k in range(1, top + 1):
        qk, qk1 = cf.q(k), cf.q(k + 1)
        lower = Fraction(1, qk1 + qk)
        upper = Fraction(1, qk1)
        b = bits
        while True:
            n_lo, n_hi = circle_norm_interval(cf.alpha, qk, b)
            if n_lo > lower and n_hi < upper:
                certified = True
                break
            # genuinely violated, or interval too wide to decide?
            if n_hi <= lower or n_lo >= upper:
                certified = False
                break
            if b >= MAX_BITS:
                if k > 1:
                    raise PrecisionError(
                        f"cannot certify strict bounds at k={k} "
                        f"within {MAX_BITS} bits")
                certified = False
                break
            b *= 2
        rows.append(ApproxRow(k=k, norm_lo=float(n_lo), norm_hi=float(n_hi),
                              lower_bound=lower, upper_bound=upper,
                              certified=certified, boundary=(k == 1)))
    return rows


# ---------------------------------------------------------------------------
# Resonance sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResonanceData:
    """Indices k with an abnormally large next denominator, and the set M
    of their convergent-denominator multiples within a frequency bound.

    Carries the alpha and convergent data it was built from so downstream
    consumers provably work with the same expansion."""

    tau: Fraction
    E: tuple[int, ...]
    M: frozenset[int]
    truncation_bound: int
    depth: int
    m_finite_within_depth: bool
    alpha: ExactAlpha
    quotients: tuple[int, ...]
    qs: tuple[int, ...]

    def threshold_exponent(self) -> Fraction:
        return 1 / self.tau + 3

    def q(self, k: int) -> int:
        return self.qs[k - 1]

    def a(self, k: int) -> int:
        return self.quotients[k - 1]


def resonance_sets(cf: ContinuedFraction, tau: float | Fraction,
                   freq_bound: int = 10 ** 6) -> ResonanceData:
    """E = {k > 1 : q_{k+1} > q_k^{1/tau+3}} over the computed depth, and
    M = union over k in E of {+-j*q_k : 1 <= j <= a_k}, truncated to
    [-freq_bound, freq_bound].

    The comparison q_{k+1} > q_k^e is done with exact integer powers of the
    rational exponent e = 1/tau + 3, so boundary cases are decided exactly.
    The finiteness flag is a depth-limited heuristic: no resonance occurs
    in the upper half of the computed range.
    """
    tau = Fraction(tau)
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    if freq_bound < 1:
        raise DomainError(f"freq_bound must be >= 1, got {freq_bound}")
    exponent = 1 / tau + 3
    u, v = exponent.numerator, exponent.denominator

    members = []
    for k in range(2, cf.depth + 1):
        if cf.q(k + 1) ** v > cf.q(k) ** u:
            members.append(k)

    m_set: set[int] = set()
    for k in members:
        qk, ak = cf.q(k), cf.a(k)
        j = 1
        while j <= ak and j * qk <= freq_bound:
            m_set.add(j * qk)
            m_set.add(-j * qk)
            j += 1

    half = cf.depth // 2
    finite_flag = all(k <= half for k in members)
    return ResonanceData(tau=tau, E=tuple(members), M=frozenset(m_set),
                         truncation_bound=freq_bound, depth=cf.depth,
                         m_finite_within_depth=finite_flag,
                         alpha=cf.alpha, quotients=cf.quotients, qs=cf.qs)
