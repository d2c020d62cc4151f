"""Mobius sieve, Mertens sums, Dirichlet characters, pretentious distance.

The Mobius function is mu(1) = 1, mu(n) = (-1)^k when n is a product of k
distinct primes, and mu(n) = 0 when a square divides n.  The pretentious
distance between 1-bounded multiplicative functions f, g is the prime sum

    sum_{p <= N} (1 - Re(f(p) conj(g(p)))) / p,

used here directly as the squared distance (every downstream consumer
squares the printed form, so we never take the root).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, SizingError

SIEVE_BLOCK = 1 << 20           # segment length; bounds transient memory
DEFAULT_MEMORY_CAP = 1 << 31    # bytes for the value table
DEFAULT_CHARACTER_CAP = 100


# ---------------------------------------------------------------------------
# Mobius sieve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MobiusTable:
    """Exact mu(n) for 1 <= n <= limit plus the ascending prime list.

    values is indexed directly by n (entry 0 is unused and set to 0).
    Immutable after construction; safe to share across threads.
    """

    limit: int
    values: np.ndarray   # int8, length limit + 1
    primes: np.ndarray   # int64, ascending

    def mu(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside sieve range [1, {self.limit}]")
        return int(self.values[n])


def _simple_prime_sieve(n: int) -> np.ndarray:
    """Primes <= n by plain Eratosthenes (used for the base primes)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_prime[p]:
            is_prime[p * p:: p] = False
    return np.nonzero(is_prime)[0].astype(np.int64)


def build_mobius_table(n_max: int, memory_cap: int = DEFAULT_MEMORY_CAP) -> MobiusTable:
    """Sieve mu(n) for all n <= n_max, segmented at SIEVE_BLOCK entries.

    Each segment keeps an int64 residual of its entries; dividing out each
    base prime once flips the sign, multiples of p^2 are zeroed, and a
    leftover residual > 1 is a single large prime factor (one more flip).
    """
    if n_max < 1:
        raise SizingError(f"n_max must be >= 1, got {n_max}")
    # values (int8) + residual scratch (int64 per block) + prime list
    if n_max + 1 > memory_cap:
        raise SizingError(
            f"n_max={n_max} exceeds memory cap of {memory_cap} table bytes")

    base_primes = _simple_prime_sieve(math.isqrt(n_max))
    values = np.zeros(n_max + 1, dtype=np.int8)

    for lo in range(1, n_max + 1, SIEVE_BLOCK):
        hi = min(lo + SIEVE_BLOCK, n_max + 1)
        residual = np.arange(lo, hi, dtype=np.int64)
        sign = np.ones(hi - lo, dtype=np.int8)
        zero = np.zeros(hi - lo, dtype=bool)
        for p in base_primes:
            p = int(p)
            start = (-lo) % p
            sign[start::p] = -sign[start::p]
            residual[start::p] //= p
            p2 = p * p
            if p2 < hi:
                start2 = (-lo) % p2
                zero[start2::p2] = True
        sign[residual > 1] = -sign[residual > 1]
        sign[zero] = 0
        values[lo:hi] = sign
    values[0] = 0

    # Full prime list <= n_max, segmented for the same memory reason.
    primes_chunks = []
    for lo in range(2, n_max + 1, SIEVE_BLOCK):
        hi = min(lo + SIEVE_BLOCK, n_max + 1)
        composite = np.zeros(hi - lo, dtype=bool)
        for p in base_primes:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                composite[start - lo::p] = True
        seg = np.nonzero(~composite)[0] + lo
        primes_chunks.append(seg[seg >= 2])
    primes = (np.concatenate(primes_chunks).astype(np.int64)
              if primes_chunks else np.empty(0, dtype=np.int64))
    return MobiusTable(limit=n_max, values=values, primes=primes)


def mu_by_factorization(n: int) -> int:
    """mu(n) straight from the definition by trial division (test oracle)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n == 1:
        return 1
    k = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            k += 1
        d += 1 if d == 2 else 2
    if n > 1:
        k += 1
    return -1 if k % 2 else 1


def mertens(table: MobiusTable, n: int) -> int:
    """Mertens function M(n) = sum_{m <= n} mu(m)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > table.limit:
        raise SizingError(f"n={n} exceeds table limit {table.limit}")
    return int(np.sum(table.values[1: n + 1], dtype=np.int64))


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletCharacter:
    """One character mod q, stored as its value table on residues 0..q-1."""

    modulus: int
    index: int
    values: np.ndarray   # complex128, length q; 0 off the units
    is_principal: bool

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])


@dataclass(frozen=True)
class CharacterTable:
    modulus: int
    characters: tuple[DirichletCharacter, ...]

    @property
    def phi(self) -> int:
        return len(self.characters)


def _primitive_root(p: int, e: int) -> int:
    """Primitive root mod p^e for odd prime p (brute-force search, p^e small)."""
    phi_p = p - 1
    factors = set()
    m = phi_p
    d = 2
    while d * d <= m:
        while m % d == 0:
            factors.add(d)
            m //= d
        d += 1
    if m > 1:
        factors.add(m)
    g = None
    for cand in range(2, p):
        if all(pow(cand, phi_p // f, p) != 1 for f in factors):
            g = cand
            break
    assert g is not None
    if e == 1:
        return g
    # g or g + p generates mod p^2, and then mod every higher power.
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _unit_group_components(q: int) -> list[tuple[int, list[tuple[int, int]]]]:
    """Cyclic decomposition of (Z/qZ)* by prime power: (p^e, [(gen, order)]).

    Odd p^e is cyclic on a primitive root; 2^e for e >= 3 needs the pair
    (-1, 3) with orders (2, 2^{e-2})."""
    comps = []
    m = q
    for p in range(2, q + 1):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            comps.append((p, e))
    if m > 1:
        comps.append((m, 1))

    out = []
    for p, e in comps:
        pe = p ** e
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                out.append((pe, [(3, 2)]))
            else:
                out.append((pe, [(pe - 1, 2), (3, 1 << (e - 2))]))
        else:
            g = _primitive_root(p, e)
            out.append((pe, [(g, pe // p * (p - 1))]))
    return out


def dirichlet_characters(q: int, cap: int = DEFAULT_CHARACTER_CAP) -> CharacterTable:
    """All phi(q) Dirichlet characters mod q from the unit-group decomposition.

    Characters are indexed lexicographically over the exponent tuples on the
    cyclic generators, so index 0 is always the principal character.
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if q > cap:
        raise SizingError(f"q={q} exceeds character modulus cap {cap}")

    if q == 1:
        chi = DirichletCharacter(1, 0, np.ones(1, dtype=np.complex128), True)
        return CharacterTable(1, (chi,))

    components = _unit_group_components(q)
    gens: list[tuple[int, int]] = []          # flattened (modulus, order)
    orders: list[int] = []
    joint_tables = []                          # per component: val -> exponent tuple
    for pe, comp_gens in components:
        for _, d in comp_gens:
            gens.append((pe, d))
            orders.append(d)
        table: dict[int, tuple[int, ...]] = {}
        exps = [0] * len(comp_gens)
        while True:
            v = 1
            for (g, _), k in zip(comp_gens, exps):
                v = (v * pow(g, k, pe)) % pe
            table[v] = tuple(exps)
            for gi in range(len(comp_gens) - 1, -1, -1):
                exps[gi] += 1
                if exps[gi] < comp_gens[gi][1]:
                    break
                exps[gi] = 0
            else:
                break
        joint_tables.append((pe, len(comp_gens), table))

    # Discrete log of every unit w.r.t. the flattened generator list.
    units = [a for a in range(q) if math.gcd(a, q) == 1]
    dlogs = np.zeros((len(units), len(gens)), dtype=np.int64)
    for ui, a in enumerate(units):
        col = 0
        for pe, n_gens, table in joint_tables:
            for k in table[a % pe]:
                dlogs[ui, col] = k
                col += 1

    phi_q = int(np.prod(orders)) if orders else 1
    chars = []
    exps = [0] * len(gens)
    for index in range(phi_q):
        values = np.zeros(q, dtype=np.complex128)
        for ui, a in enumerate(units):
            angle = sum(exps[gi] * int(dlogs[ui, gi]) / orders[gi]
                        for gi in range(len(gens)))
            values[a] = np.exp(2j * np.pi * angle)
        chars.append(DirichletCharacter(
            q, index, values, is_principal=all(e == 0 for e in exps)))
        for gi in range(len(gens) - 1, -1, -1):
            exps[gi] += 1
            if exps[gi] < orders[gi]:
                break
            exps[gi] = 0
    assert len(chars) == phi_q
    return CharacterTable(q, tuple(chars))


# ---------------------------------------------------------------------------
# Pretentious distance
# ---------------------------------------------------------------------------

def pretentious_distance_sq(
    f: Callable[[int], complex],
    g: Callable[[int], complex],
    n_max: int,
    primes: Sequence[int] | np.ndarray | None = None,
) -> float:
    """sum_{p <= n_max} (1 - Re(f(p) conj(g(p)))) / p.

    Both f and g must be 1-bounded on primes up to n_max; each summand then
    lies in [0, 2/p].  A prime list may be supplied to avoid re-sieving.
    """
    if primes is None:
        primes = _simple_prime_sieve(n_max)
    total = 0.0
    for p in primes:
        p = int(p)
        if p > n_max:
            break
        fp = complex(f(p))
        gp = complex(g(p))
        if abs(fp) > 1 + 1e-12 or abs(gp) > 1 + 1e-12:
            raise DomainError(
                f"multiplicative input exceeds modulus 1 at p={p}: "
                f"|f(p)|={abs(fp):.6g}, |g(p)|={abs(gp):.6g}")
        total += (1.0 - (fp * gp.conjugate()).real) / p
    return total


def default_t_grid(n_max: int, count: int = 201) -> np.ndarray:
    """count equispaced points in [-log n_max, log n_max], with 0 included."""
    span = math.log(max(n_max, 2))
    grid = np.linspace(-span, span, count)
    return np.union1d(grid, [0.0])


@dataclass(frozen=True)
class PretentiousRow:
    q: int
    chi_index: int
    t: float
    distance_sq: float


def pretentious_scan(
    table: MobiusTable,
    n_max: int,
    big_q: int,
    t_grid: Iterable[float],
    cap: int = DEFAULT_CHARACTER_CAP,
) -> list[PretentiousRow]:
    """Distance of mu to every twisted character chi(n) n^{it} on the grid.

    Vectorised over primes: with f = mu, f(p) = -1, so the summand is
    (1 + Re(chi(p) p^{it})) / p.
    """
    t_values = [float(t) for t in t_grid]
    if not t_values:
        raise DomainError("t_grid must be nonempty")
    if big_q > cap:
        raise SizingError(f"Q={big_q} exceeds character modulus cap {cap}")
    ps = table.primes[table.primes <= n_max]
    if len(ps) == 0:
        raise DomainError(f"no primes <= {n_max} in table (limit {table.limit})")
    pf = ps.astype(np.float64)
    logp = np.log(pf)
    inv_p = 1.0 / pf
    rows = []
    for q in range(1, big_q + 1):
        ctable = dirichlet_characters(q, cap=cap)
        for chi in ctable.characters:
            chi_p = chi.values[ps % q]
            for t in t_values:
                g = chi_p * np.exp(1j * t * logp)
                dist = float(np.sum((1.0 + g.real) * inv_p))
                rows.append(PretentiousRow(q, chi.index, t, dist))
    return rows


def mobius_non_pretentious(
    table: MobiusTable,
    n_max: int,
    big_q: int,
    t_grid: Iterable[float],
    cap: int = DEFAULT_CHARACTER_CAP,
) -> float:
    """Grid-restricted M(mu; N, Q): min over q <= Q, chi mod q, t in the grid.

    An upper bound for the true infimum over continuous t; it grows with N,
    witnessing that mu pretends to be no twisted character.
    """
    rows = pretentious_scan(table, n_max, big_q, t_grid, cap=cap)
    return min(r.distance_sq for r in rows)


def mobius_on_primes(table: MobiusTable) -> Callable[[int], complex]:
    """mu as a callable for the pretentious-distance API (mu(p) = -1)."""
    def f(n: int) -> complex:
        return complex(table.mu(n))
    return f
