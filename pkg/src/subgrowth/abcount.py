"""Exact subgroup counting for finite abelian groups.

Two independent paths produce the same table of counts by index:

* the formula path works per prime on the exponent partition, summing
  the classical count of subgroups of type mu inside type lambda
  (a product of p-binomials read off the conjugate partitions), then
  convolving primes multiplicatively on the index;
* the brute-force path enumerates every subgroup of the explicit tuple
  group by closing prime-order generator extensions, and exists purely
  as an oracle with a different code shape.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import ResourceRefusal, ValidationError
from .numutil import factorize

BRUTE_FORCE_BOUND = 10_000
FORMULA_ORDER_BOUND = 1 << 256


@dataclass(frozen=True)
class AbelianShape:
    """A finite abelian group presented as a product of cyclic factors.

    cyclic_orders is a sorted multiset of integers >= 2; the empty tuple
    is the trivial group. Different presentations of the same group (for
    example (12,) and (3, 4)) are distinct shapes with identical tables.
    """

    cyclic_orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(sorted(self.cyclic_orders))
        if any(not isinstance(x, int) or x < 2 for x in orders):
            raise ValidationError(f"cyclic orders must be integers >= 2, got {self.cyclic_orders}")
        object.__setattr__(self, "cyclic_orders", orders)

    @classmethod
    def of(cls, *orders: int) -> "AbelianShape":
        return cls(tuple(orders))

    @property
    def order(self) -> int:
        n = 1
        for x in self.cyclic_orders:
            n *= x
        return n

    def multiplicity(self, x: int) -> int:
        return self.cyclic_orders.count(x)

    @property
    def max_multiplicity(self) -> int:
        return max((self.multiplicity(x) for x in set(self.cyclic_orders)), default=0)

    def primary_view(self) -> dict[int, tuple[int, ...]]:
        """Map prime -> exponent partition (weakly decreasing) of its
        primary component; the unique primary decomposition."""
        parts: dict[int, list[int]] = {}
        for x in self.cyclic_orders:
            for p, e in factorize(x).items():
                parts.setdefault(p, []).append(e)
        return {p: tuple(sorted(es, reverse=True)) for p, es in sorted(parts.items())}

    def __str__(self):
        if not self.cyclic_orders:
            return "C1"
        return " x ".join(f"C{x}" for x in self.cyclic_orders)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """q-binomial coefficient, exact: prod_{i=1..k} (q^{n-k+i}-1)/(q^i-1).
    By convention 0 when k < 0 or k > n."""
    if not isinstance(q, int) or q < 2:
        raise ValidationError(f"q must be an integer >= 2, got {q!r}")
    if n < 0:
        raise ValidationError(f"n must be nonnegative, got {n}")
    if k < 0 or k > n:
        return 0
    k = min(k, n - k)
    out = 1
    for i in range(1, k + 1):
        out = out * (q ** (n - k + i) - 1) // (q**i - 1)
    return out


class SubgroupCountTable:
    """Counts of subgroups of a fixed finite abelian group, by index.

    Keys are exactly the divisors of the group order that occur (all of
    them, for abelian groups); values are exact integers.
    """

    def __init__(self, group_order: int, counts: dict[int, int]):
        self.group_order = group_order
        self.counts = dict(sorted(counts.items()))

    def count(self, index: int) -> int:
        return self.counts.get(index, 0)

    def total(self) -> int:
        return sum(self.counts.values())

    def s_n(self, n: int) -> int:
        return sum(c for k, c in self.counts.items() if k <= n)

    def __eq__(self, other):
        return (
            isinstance(other, SubgroupCountTable)
            and self.group_order == other.group_order
            and self.counts == other.counts
        )

    def __repr__(self):
        return f"SubgroupCountTable(|A|={self.group_order}, {self.counts})"


def _conjugate(lam: tuple[int, ...]) -> tuple[int, ...]:
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part >= i) for i in range(1, lam[0] + 1))


@functools.lru_cache(maxsize=None)
def _subgroup_counts_of_p_group(lam: tuple[int, ...], p: int) -> dict[int, int]:
    """{b: number of subgroups of index p^b} for the abelian p-group of
    exponent type lam.

    Enumerates subpartitions mu <= lam through their conjugates m = mu'
    and accumulates the classical count

        N(lam, mu; p) = prod_j p^{m[j+1] (lam'[j] - m[j])}
                        * binom(lam'[j] - m[j+1], m[j] - m[j+1])_p

    (0-indexed j, with m[depth] = 0), grouped by co-weight b = |lam|-|mu|.
    """
    if not lam:
        return {0: 1}
    lc = _conjugate(lam)
    weight = sum(lam)
    depth = len(lc)
    out: dict[int, int] = {}

    def rec(j: int, m_prev: int, w: int, acc: int):
        # parts m[0..j-1] chosen, m_prev = m[j-1]; acc holds factors < j-1
        if j == depth:
            final = acc * gaussian_binomial(lc[depth - 1], m_prev, p)
            out[weight - w] = out.get(weight - w, 0) + final
            return
        for v in range(min(m_prev, lc[j]) + 1):
            f = p ** (v * (lc[j - 1] - m_prev)) * gaussian_binomial(lc[j - 1] - v, m_prev - v, p)
            rec(j + 1, v, w + v, acc * f)

    for v0 in range(lc[0] + 1):
        rec(1, v0, v0, 1)
    return out


def _merge_prime_tables(tables: list[dict[int, int]], primes: list[int]) -> dict[int, int]:
    merged: dict[int, int] = {1: 1}
    for p, tbl in zip(primes, tables):
        nxt: dict[int, int] = {}
        for idx, cnt in merged.items():
            for b, c in tbl.items():
                key = idx * p**b
                nxt[key] = nxt.get(key, 0) + cnt * c
        merged = nxt
    return merged


def subgroup_counts_by_index(A: AbelianShape) -> SubgroupCountTable:
    """Exact table of subgroup counts by index, formula path."""
    if A.order > FORMULA_ORDER_BOUND:
        raise ResourceRefusal(
            f"|A| = {A.order} exceeds the formula-path order bound {FORMULA_ORDER_BOUND}",
            bound=FORMULA_ORDER_BOUND,
            requested=A.order,
        )
    primary = A.primary_view()
    tables = [_subgroup_counts_of_p_group(lam, p) for p, lam in primary.items()]
    counts = _merge_prime_tables(tables, list(primary.keys()))
    return SubgroupCountTable(A.order, counts)


def s_n(A: AbelianShape, n: int) -> int:
    """Number of subgroups of A of index at most n."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    return subgroup_counts_by_index(A).s_n(n)


def _index_encode(coords: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return coords @ weights


def brute_force_counts(A: AbelianShape, element_bound: int = BRUTE_FORCE_BOUND) -> SubgroupCountTable:
    """Oracle path: enumerate every subgroup of the explicit tuple group.

    Works over the materialized element set with additive index
    arithmetic; subgroups as element bitmasks, grown bottom-up by
    prime-order extensions (for abelian groups every covering step in the
    subgroup lattice is such an extension). Independent of the formula
    path by construction.
    """
    N = A.order
    if N > element_bound:
        raise ResourceRefusal(
            f"|A| = {N} exceeds the brute-force element bound {element_bound}",
            bound=element_bound,
            requested=N,
        )
    orders = np.array(A.cyclic_orders, dtype=np.int64)
    t = len(A.cyclic_orders)
    if t == 0:
        return SubgroupCountTable(1, {1: 1})
    # mixed-radix decode/encode tables
    weights = np.ones(t, dtype=np.int64)
    for i in range(t - 2, -1, -1):
        weights[i] = weights[i + 1] * orders[i + 1]
    idx = np.arange(N, dtype=np.int64)
    coords = np.empty((N, t), dtype=np.int64)
    rem = idx.copy()
    for i in range(t):
        coords[:, i] = rem // weights[i]
        rem = rem % weights[i]

    exponent_primes = sorted(factorize(int(np.lcm.reduce(orders))).keys())
    pmul = {p: _index_encode((coords * p) % orders, weights) for p in exponent_primes}

    trivial_members = np.zeros(N, dtype=bool)
    trivial_members[0] = True
    seen = {trivial_members.tobytes()}
    queue = [(trivial_members, np.array([0], dtype=np.int64))]
    counts: dict[int, int] = {}

    while queue:
        members, elems = queue.pop()
        counts[N // len(elems)] = counts.get(N // len(elems), 0) + 1
        for p in exponent_primes:
            cand = np.nonzero(members[pmul[p]] & ~members)[0]
            if cand.size == 0:
                continue
            processed = np.zeros(N, dtype=bool)
            for g in cand:
                if processed[g]:
                    continue
                new_members = members.copy()
                gc = coords[g]
                shifted = coords[elems]
                for _ in range(p - 1):
                    shifted = (shifted + gc) % orders
                    coset = _index_encode(shifted, weights)
                    new_members[coset] = True
                    processed[coset] = True
                key = new_members.tobytes()
                if key not in seen:
                    seen.add(key)
                    queue.append((new_members, np.nonzero(new_members)[0].astype(np.int64)))
    return SubgroupCountTable(N, counts)
