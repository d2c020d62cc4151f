"""Typical-factorization sets and bilinear Mobius averages.

The ladder of intervals [P_j, Q_j] is defined for j > 1 by

    P_j = exp(j^{4j} (log Q_1)^{j-1} log P_1),
    Q_j = exp(j^{4j+2} (log Q_1)^j),

and the typical set S consists of n <= N having at least one prime factor
in every level up to the largest J with Q_J <= exp(sqrt(log N_0)).  All
level arithmetic is carried in log scale: P_2 already overflows any native
float for realistic Q_1, yet only levels small enough to survive the
Q_J cap are ever materialised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, SizingError
from .numtheory import MobiusTable, _simple_prime_sieve

LEVEL_CAP = 64   # Q_J grows doubly fast; desk N never admits J > 3


@dataclass(frozen=True)
class MrtLadder:
    """Interval ladder [P_j, Q_j], j = 1..J, stored in log scale."""

    p1: float
    q1: float
    n0: int
    n: int
    log_levels: tuple[tuple[float, float], ...]

    @property
    def depth(self) -> int:
        return len(self.log_levels)

    @property
    def levels(self) -> tuple[tuple[float, float], ...]:
        """(P_j, Q_j) as floats; safe because kept levels obey the Q_J cap.

        Level 1 is returned as the exact endpoints supplied, not an
        exp(log) roundtrip, so integer boundary primes are never lost."""
        out = [(self.p1, self.q1)]
        out.extend((math.exp(a), math.exp(b)) for a, b in self.log_levels[1:])
        return tuple(out)

    def level_primes(self) -> list[np.ndarray]:
        """Primes inside each interval [P_j, Q_j]."""
        top = math.ceil(math.exp(self.log_levels[-1][1])) if self.log_levels else 2
        top = max(top, math.ceil(self.q1))
        primes = _simple_prime_sieve(top)
        out = []
        for p_j, q_j in self.levels:
            out.append(primes[(primes >= p_j) & (primes <= q_j)])
        return out


def _log_level(j: int, log_p1: float, log_q1: float) -> tuple[float, float]:
    if j == 1:
        return (log_p1, log_q1)
    lp = (4 * j) * math.log(j) + (j - 1) * math.log(log_q1) + math.log(log_p1)
    lq = (4 * j + 2) * math.log(j) + j * math.log(log_q1)
    # these are logs of log P_j / log Q_j; exponentiate once
    return (math.exp(lp), math.exp(lq))


def build_ladder(p1: float, q1: float, n0: int, n: int) -> MrtLadder:
    """Build the ladder, taking J maximal with Q_J <= exp(sqrt(log N_0)).

    Every violated precondition is named in the raised error.
    """
    if not p1 > 10:
        raise ParameterError(f"require P1 > 10, got P1={p1}")
    if not p1 < q1:
        raise ParameterError(f"require P1 < Q1, got P1={p1}, Q1={q1}")
    if not q1 <= n:
        raise ParameterError(f"require Q1 <= N, got Q1={q1}, N={n}")
    if not (math.isqrt(n) <= n0 <= n):
        raise ParameterError(f"require sqrt(N) <= N0 <= N, got N0={n0}, N={n}")
    cap = math.sqrt(math.log(n0))
    if math.log(q1) > cap * (1 + 1e-12):
        raise ParameterError(
            f"require Q1 <= exp(sqrt(log N0)): log Q1 = {math.log(q1):.6g} "
            f"> sqrt(log N0) = {cap:.6g}")

    log_p1, log_q1 = math.log(p1), math.log(q1)
    levels = []
    for j in range(1, LEVEL_CAP + 1):
        lp, lq = _log_level(j, log_p1, log_q1)
        if lq > cap * (1 + 1e-12):
            break
        levels.append((lp, lq))
    if not levels:
        raise ParameterError("no ladder level survives the Q_J cap")
    return MrtLadder(p1=p1, q1=q1, n0=n0, n=n, log_levels=tuple(levels))


def in_typical_set(n: int, ladder: MrtLadder, primes) -> bool:
    """True iff n has at least one prime factor in every ladder level."""
    if not 1 <= n <= ladder.n:
        raise DomainError(f"n={n} outside [1, {ladder.n}]")
    primes = np.asarray(primes)
    top = ladder.levels[-1][1]
    if len(primes) == 0 or primes[-1] < math.floor(top):
        raise DomainError(
            f"prime list must cover ceil(Q_J) = {math.ceil(top)}")
    for p_j, q_j in ladder.levels:
        level = primes[(primes >= p_j) & (primes <= q_j)]
        if not any(n % int(p) == 0 for p in level):
            return False
    return True


def typical_set_mask(ladder: MrtLadder, n: int) -> np.ndarray:
    """Boolean membership of 1..n in the typical set (index 0 unused)."""
    if n > ladder.n:
        raise DomainError(f"n={n} exceeds ladder range {ladder.n}")
    mask = np.ones(n + 1, dtype=bool)
    mask[0] = False
    for level in ladder.level_primes():
        hit = np.zeros(n + 1, dtype=bool)
        for p in level:
            hit[int(p):: int(p)] = True
        mask &= hit
    return mask


@dataclass(frozen=True)
class TypicalSetStats:
    """Exact membership counts plus the reference density ratio.

    density_bound is log P1 / log Q1, the complement bound with its
    (unknown) absolute constant set to 1; it is reported for comparison,
    never asserted against.
    """

    n: int
    member_count: int
    complement_count: int
    density_bound: float

    @property
    def complement_ratio(self) -> float:
        return self.complement_count / self.n


def complement_density(ladder: MrtLadder, table: MobiusTable) -> TypicalSetStats:
    """Scan 1..N exactly and count members/non-members of the typical set."""
    if ladder.n > table.limit:
        raise SizingError(
            f"ladder N={ladder.n} exceeds sieve limit {table.limit}")
    mask = typical_set_mask(ladder, ladder.n)
    members = int(np.count_nonzero(mask[1:]))
    return TypicalSetStats(
        n=ladder.n,
        member_count=members,
        complement_count=ladder.n - members,
        density_bound=math.log(ladder.p1) / math.log(ladder.q1),
    )


def bilinear_mobius_average(table: MobiusTable, ladder: MrtLadder | None,
                            n: int, ell: int) -> float:
    """(1/(N L^2)) sum_{l1,l2 < L} |sum_{m in [1,N] cap S} mu(m+l1) mu(m+l2)|.

    The inner sums over all (l1, l2) pairs are assembled as one L x L Gram
    matrix of shifted mu slices, with the typical-set mask folded into one
    side (mask^2 = mask).  Passing ladder=None disables the membership
    restriction (S = [1, N]).
    """
    if ell < 1:
        raise DomainError(f"L must be >= 1, got {ell}")
    if ladder is not None and n > ladder.n:
        raise DomainError(f"N={n} exceeds the ladder range {ladder.n}")
    if n + ell > table.limit + 1:
        raise SizingError(
            f"need mu up to N+L-1 = {n + ell - 1}, sieve limit {table.limit}")
    if ladder is None:
        mask = np.ones(n, dtype=np.float64)
    else:
        mask = typical_set_mask(ladder, n)[1: n + 1].astype(np.float64)
    shifts = np.empty((ell, n), dtype=np.float64)
    for l in range(ell):
        shifts[l] = table.values[1 + l: n + 1 + l]
    masked = shifts * mask
    gram = masked @ shifts.T
    return float(np.sum(np.abs(gram)) / (n * ell * ell))


def chowla_pair_average(table: MobiusTable, n: int, h1: int, h2: int) -> float:
    """(1/N) sum_{m <= N} mu(m+h1) mu(m+h2)."""
    if h1 < 0 or h2 < 0:
        raise DomainError("shifts must be nonnegative")
    if n + max(h1, h2) > table.limit:
        raise SizingError(
            f"need mu up to N+h = {n + max(h1, h2)}, sieve limit {table.limit}")
    a = table.values[1 + h1: n + 1 + h1].astype(np.float64)
    b = table.values[1 + h2: n + 1 + h2].astype(np.float64)
    return float(np.dot(a, b) / n)
