"""Explicit finite matrix groups over Z/m and their subgroup lattices.

Elements are materialized and indexed; a full multiplication table is
built (and cached on disk, content-addressed by the defining data)
because subgroup enumeration is multiplication-bound.

Two enumeration algorithms:

* enumerate_subgroups: bottom-up cyclic extension. Seeds are the cyclic
  subgroups; for nonsolvable groups the seeds also include joins of
  prime-order cyclic pairs, which pick up the perfect subgroups at this
  scale (every perfect group small enough to pass the element bound is
  generated by two elements of prime order). Each seed is then extended
  by normalizer cosets, which reaches every subgroup with a subnormal
  cyclic chain over a seed.
* enumerate_subgroups_by_pair_joins: the naive oracle. Joins of pairs of
  cyclic subgroups, then a sweep extending every found subgroup by
  elements with a prime power in it, iterated to a fixed point (every
  proper containment admits such a one-generator step).

The two must agree exactly; tests and the CLI selfcheck enforce this.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ResourceRefusal, ValidationError
from .numutil import factorize, is_prime
from .rootsys import DEFAULT_PRECISION, LieType

ENUMERATION_BOUND = 10_000
ELEMENT_BOUND = 100_000
TABLE_CAP = 10_000


def default_cache_dir() -> str:
    env = os.environ.get("SUBGROWTH_CACHE_DIR")
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "subgrowth")


def _mat_mul(a, b, m: int, k: int):
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) % m for j in range(k)) for i in range(k)
    )


def _det(mat, m: int) -> int:
    k = len(mat)
    if k == 1:
        return mat[0][0] % m
    total = 0
    for j in range(k):
        minor = tuple(row[:j] + row[j + 1 :] for row in mat[1:])
        term = mat[0][j] * _det(minor, m)
        total += -term if j % 2 else term
    return total % m


class FiniteMatrixGroup:
    """A finite group of k x k matrices over Z/m, fully materialized.

    Elements are sorted tuples of flattened entries; indices refer to
    that ordering. characteristic_p, when set, is the prime used for
    diamond quotients.
    """

    def __init__(
        self,
        modulus: int,
        degree: int,
        generators,
        characteristic_p: int | None = None,
        *,
        element_bound: int = ELEMENT_BOUND,
        table_cap: int = TABLE_CAP,
        cache_dir: str | None = None,
    ):
        if not isinstance(modulus, int) or modulus < 2:
            raise ValidationError(f"modulus must be an integer >= 2, got {modulus!r}")
        if not isinstance(degree, int) or degree < 1:
            raise ValidationError(f"degree must be a positive integer, got {degree!r}")
        if characteristic_p is not None and not is_prime(characteristic_p):
            raise ValidationError(f"characteristic_p must be prime, got {characteristic_p}")
        self.modulus = modulus
        self.degree = degree
        self.characteristic_p = characteristic_p
        self._table_cap = table_cap
        self._cache_dir = cache_dir if cache_dir is not None else default_cache_dir()
        gens = []
        for g in generators:
            mat = tuple(tuple(int(x) % modulus for x in row) for row in g)
            if len(mat) != degree or any(len(row) != degree for row in mat):
                raise ValidationError(f"generator is not {degree}x{degree}: {g}")
            if math.gcd(_det(mat, modulus), modulus) != 1:
                raise ValidationError(f"generator determinant is not a unit mod {modulus}: {g}")
            gens.append(mat)
        self.generators = tuple(gens)
        self._materialize(element_bound)
        self._table: np.ndarray | None = None
        self._inv: np.ndarray | None = None

    def _materialize(self, element_bound: int):
        m, k = self.modulus, self.degree
        identity = tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for a in frontier:
                for g in self.generators:
                    b = _mat_mul(a, g, m, k)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
                        if len(seen) > element_bound:
                            raise ResourceRefusal(
                                f"group has more than {element_bound} elements (element bound)",
                                bound=element_bound,
                            )
            frontier = nxt
        self.elements = tuple(sorted(seen))
        self._index = {el: i for i, el in enumerate(self.elements)}
        self.identity = self._index[identity]
        self.generator_indices = tuple(self._index[g] for g in self.generators)

    @property
    def order(self) -> int:
        return len(self.elements)

    def _cache_key(self) -> str:
        payload = json.dumps(
            {"m": self.modulus, "k": self.degree, "gens": sorted(self.generators)},
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def table(self) -> np.ndarray:
        """The N x N multiplication table on element indices, disk-cached."""
        if self._table is not None:
            return self._table
        n = self.order
        if n > self._table_cap:
            raise ResourceRefusal(
                f"group order {n} exceeds the multiplication-table cap {self._table_cap}",
                bound=self._table_cap,
                requested=n,
            )
        path = os.path.join(self._cache_dir, f"{self._cache_key()}.npz")
        if os.path.exists(path):
            try:
                with np.load(path) as data:
                    if data["table"].shape == (n, n):
                        self._table = data["table"]
                        return self._table
            except (OSError, ValueError, KeyError):
                pass  # rebuild on any cache damage
        m, k = self.modulus, self.degree
        mats = np.array(self.elements, dtype=np.int64).reshape(n, k, k)
        dtype = np.int16 if n <= 32767 else np.int32
        table = np.empty((n, n), dtype=dtype)
        # index products via a perfect hash of the flattened entries
        weights = (m ** np.arange(k * k, dtype=np.int64))[::-1]
        codes = (mats.reshape(n, -1) @ weights).astype(np.int64)
        code_to_idx = dict(zip(codes.tolist(), range(n)))
        for i in range(n):
            prods = np.einsum("st,jtu->jsu", mats[i], mats) % m
            prod_codes = (prods.reshape(n, -1) @ weights).tolist()
            table[i] = [code_to_idx[c] for c in prod_codes]
        self._table = table
        try:
            os.makedirs(self._cache_dir, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self._cache_dir, suffix=".npz.tmp")
            with os.fdopen(fd, "wb") as fh:
                np.savez_compressed(fh, table=table)
            os.replace(tmp, path)  # atomic: safe with concurrent readers
        except OSError:
            pass  # cache is best-effort
        return table

    def inverses(self) -> np.ndarray:
        if self._inv is None:
            t = self.table()
            self._inv = np.argmax(t == self.identity, axis=1).astype(np.int32)
        return self._inv

    def element_order(self, idx: int) -> int:
        t = self.table()
        n = 1
        x = idx
        while x != self.identity:
            x = int(t[x, idx])
            n += 1
        return n


def special_linear_group(degree: int, modulus: int, **kwargs) -> FiniteMatrixGroup:
    """SL_degree(Z/modulus), generated by the adjacent elementary
    transvections (which generate over any Z/m)."""
    if degree < 2:
        raise ValidationError(f"special linear group needs degree >= 2, got {degree}")
    gens = []
    for i in range(degree - 1):
        for j, i2 in ((i, i + 1), (i + 1, i)):
            mat = [[1 if a == b else 0 for b in range(degree)] for a in range(degree)]
            mat[j][i2] = 1
            gens.append(mat)
    return FiniteMatrixGroup(modulus, degree, gens, **kwargs)


def sl2_order(m: int) -> int:
    """|SL_2(Z/m)| = m^3 prod_{p | m} (1 - p^-2)."""
    order = m**3
    for p in factorize(m):
        order = order // p**2 * (p**2 - 1)
    return order


@dataclass(frozen=True)
class Subgroup:
    """A subgroup as a sorted tuple of element indices of its parent."""

    elements: tuple[int, ...]
    order: int
    index: int


class _Lattice:
    """Internal working form: masks as Python ints, element arrays,
    generator lists."""

    def __init__(self, group: FiniteMatrixGroup):
        self.group = group
        self.table = group.table()
        self.inv = group.inverses()
        self.n = group.order
        self.entries: dict[int, tuple[np.ndarray, list[int]]] = {}

    def mask_of(self, elems: np.ndarray) -> int:
        mask = 0
        for e in elems.tolist():
            mask |= 1 << e
        return mask

    def add(self, elems: np.ndarray, gens: list[int]) -> tuple[int, bool]:
        mask = self.mask_of(elems)
        if mask in self.entries:
            return mask, False
        self.entries[mask] = (np.sort(elems).astype(np.int32), gens)
        return mask, True

    def closure(self, start_elems, gens: list[int]) -> np.ndarray:
        """Subgroup generated: right-multiplication BFS from the start
        set (must contain the identity) by the generator list."""
        members = np.zeros(self.n, dtype=bool)
        start = np.asarray(start_elems, dtype=np.int32)
        members[start] = True
        garr = np.array(sorted(set(gens)), dtype=np.int32)
        if garr.size:
            members[garr] = True
        frontier = np.nonzero(members)[0].astype(np.int32)
        while frontier.size and garr.size:
            prods = self.table[np.ix_(frontier, garr)].ravel()
            fresh = np.unique(prods[~members[prods]])
            members[fresh] = True
            frontier = fresh.astype(np.int32)
        return np.nonzero(members)[0].astype(np.int32)

    def cyclic_orbit(self, g: int) -> np.ndarray:
        out = [self.group.identity]
        x = g
        while x != self.group.identity:
            out.append(x)
            x = int(self.table[x, g])
        return np.array(sorted(out), dtype=np.int32)

    def normalizer_mask(self, mask: int, gens: list[int]) -> np.ndarray:
        member = np.zeros(self.n, dtype=bool)
        elems = self.entries[mask][0]
        member[elems] = True
        ok = np.ones(self.n, dtype=bool)
        for h in gens:
            conj = self.table[self.table[:, h], self.inv[np.arange(self.n)]]
            ok &= member[conj]
        return ok

    def derived_mask(self, mask: int) -> int:
        """Commutator subgroup: normal closure in H of the commutators of
        a generating set."""
        elems, gens = self.entries[mask]
        if not gens:
            return 1 << self.group.identity
        t, inv = self.table, self.inv
        dgens = set()
        for a in gens:
            for b in gens:
                comm = int(t[t[t[a, b], inv[a]], inv[b]])
                if comm != self.group.identity:
                    dgens.add(comm)
        if not dgens:
            return 1 << self.group.identity
        while True:
            delems = self.closure([self.group.identity], sorted(dgens))
            new = set()
            for g in gens:
                conj = t[t[g, delems], inv[g]]
                for c in np.unique(conj).tolist():
                    if c not in dgens:
                        new.add(int(c))
            in_d = np.zeros(self.n, dtype=bool)
            in_d[delems] = True
            new = {c for c in new if not in_d[c]}
            if not new:
                der_mask = 0
                for e in delems.tolist():
                    der_mask |= 1 << e
                return der_mask
            dgens |= new


def _is_solvable(lat: _Lattice) -> bool:
    elems = np.arange(lat.n, dtype=np.int32)
    mask = lat.mask_of(elems)
    if mask not in lat.entries:
        lat.entries[mask] = (elems, list(lat.group.generator_indices))
    seen = set()
    cur = mask
    while True:
        der = lat.derived_mask(cur)
        if der == 1 << lat.group.identity:
            return True
        if der == cur or der in seen:
            return False
        seen.add(cur)
        if der not in lat.entries:
            delems = np.nonzero(_mask_bits(der, lat.n))[0].astype(np.int32)
            lat.entries[der] = (delems, _greedy_generators(lat, delems))
        cur = der


def _mask_bits(mask: int, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=bool)
    idx = 0
    while mask:
        low = mask & -mask
        out[low.bit_length() - 1] = True
        mask ^= low
    return out


def _greedy_generators(lat: _Lattice, elems: np.ndarray) -> list[int]:
    gens: list[int] = []
    covered = np.zeros(lat.n, dtype=bool)
    covered[lat.group.identity] = True
    for e in elems.tolist():
        if not covered[e]:
            gens.append(int(e))
            covered[lat.closure([lat.group.identity], gens)] = True
            if covered[elems].all():
                break
    return gens


def _wrap(lat: _Lattice) -> list[Subgroup]:
    n = lat.group.order
    subs = [
        Subgroup(elements=tuple(elems.tolist()), order=len(elems), index=n // len(elems))
        for elems, _ in lat.entries.values()
    ]
    subs.sort(key=lambda s: (s.order, s.elements))
    return subs


def enumerate_subgroups(G: FiniteMatrixGroup, *, enumeration_bound: int = ENUMERATION_BOUND) -> list[Subgroup]:
    """Every subgroup of G exactly once, by bottom-up cyclic extension,
    deterministically ordered by (order, element list)."""
    if G.order > enumeration_bound:
        raise ResourceRefusal(
            f"group order {G.order} exceeds the enumeration bound {enumeration_bound}",
            bound=enumeration_bound,
            requested=G.order,
        )
    lat = _Lattice(G)
    ident = G.identity
    lat.add(np.array([ident], dtype=np.int32), [])
    # all cyclic subgroups; remember one prime-order generator per prime cyclic
    prime_cyclic: list[int] = []
    order_of = {}
    for g in range(G.order):
        orbit = lat.cyclic_orbit(g)
        order_of[g] = len(orbit)
        _, new = lat.add(orbit, [g])
        if new and is_prime(len(orbit)):
            prime_cyclic.append(g)
    # perfect seeds (nonsolvable groups only): prime-order pair joins
    if not _is_solvable(lat):
        for i, g1 in enumerate(prime_cyclic):
            for g2 in prime_cyclic[i + 1 :]:
                elems = lat.closure([ident], [g1, g2])
                lat.add(elems, [g1, g2])
    # normalizer-respecting cyclic extensions to a fixed point
    queue = list(lat.entries.keys())
    while queue:
        mask = queue.pop()
        elems, gens = lat.entries[mask]
        if len(elems) == G.order:
            continue
        norm = lat.normalizer_mask(mask, gens) if gens else np.ones(lat.n, dtype=bool)
        in_h = np.zeros(lat.n, dtype=bool)
        in_h[elems] = True
        candidates = np.nonzero(norm & ~in_h)[0]
        coset_done = np.zeros(lat.n, dtype=bool)
        for g in candidates.tolist():
            if coset_done[g]:
                continue
            coset_done[lat.table[elems, g]] = True  # <H, hg> = <H, g>
            # K = H <g>, a union of cosets H g^j since g normalizes H
            new_members = in_h.copy()
            x = g
            while not new_members[x]:
                new_members[lat.table[elems, x]] = True
                x = int(lat.table[x, g])
            kelems = np.nonzero(new_members)[0].astype(np.int32)
            _, added = lat.add(kelems, gens + [g])
            if added:
                queue.append(lat.mask_of(kelems))
    return _wrap(lat)


def enumerate_subgroups_by_pair_joins(
    G: FiniteMatrixGroup, *, enumeration_bound: int = ENUMERATION_BOUND
) -> list[Subgroup]:
    """Independent oracle enumeration: closure over all pairs of cyclic
    subgroups (equivalently all element pairs), then a fixed-point sweep
    extending each subgroup by elements with a prime power inside it."""
    if G.order > enumeration_bound:
        raise ResourceRefusal(
            f"group order {G.order} exceeds the enumeration bound {enumeration_bound}",
            bound=enumeration_bound,
            requested=G.order,
        )
    t = G.table()
    n = G.order
    ident = G.identity
    found: dict[int, np.ndarray] = {}

    def join(seed_elems, gens) -> np.ndarray:
        # plain word BFS, deliberately distinct from _Lattice.closure
        members = np.zeros(n, dtype=bool)
        members[ident] = True
        members[np.asarray(gens, dtype=np.int64)] = True
        members[np.asarray(seed_elems, dtype=np.int64)] = True
        frontier = np.nonzero(members)[0]
        garr = np.asarray(sorted(gens), dtype=np.int64)
        while frontier.size:
            prods = np.unique(t[np.ix_(frontier, garr)])
            frontier = prods[~members[prods]]
            members[frontier] = True
        return np.nonzero(members)[0].astype(np.int32)

    def record(elems: np.ndarray) -> bool:
        mask = 0
        for e in elems.tolist():
            mask |= 1 << e
        if mask in found:
            return False
        found[mask] = elems
        return True

    record(np.array([ident], dtype=np.int32))
    # cyclic subgroups, iterating elements in descending order
    reps: list[tuple[int, np.ndarray]] = []
    seen_masks = set()
    for g in range(n - 1, -1, -1):
        elems = [ident]
        x = g
        while x != ident:
            elems.append(x)
            x = int(t[x, g])
        arr = np.array(sorted(elems), dtype=np.int32)
        mask = 0
        for e in elems:
            mask |= 1 << e
        record(arr)
        if mask not in seen_masks:
            seen_masks.add(mask)
            reps.append((g, arr))
    # all pairs of cyclic subgroups
    for i in range(len(reps)):
        g1, c1 = reps[i]
        for j in range(i + 1, len(reps)):
            g2, c2 = reps[j]
            record(join(c1, [g1, g2]))
    # fixed-point sweep by prime-power-order elements: for H < K there is
    # always x in K - H of prime power order with <H, x> <= K
    ppow = [g for g in range(n) if _is_prime_power(G.element_order(g))]
    worklist = list(found.keys())
    while worklist:
        mask = worklist.pop()
        elems = found[mask]
        if len(elems) == n:
            continue
        in_h = np.zeros(n, dtype=bool)
        in_h[elems] = True
        gens_h = _pair_join_generators(t, ident, elems, in_h)
        covered = np.zeros(n, dtype=bool)
        for x in ppow:
            if in_h[x] or covered[x]:
                continue
            covered[t[elems, x]] = True
            k = join(elems, gens_h + [x])
            if record(k):
                worklist.append(_mask_int(k))
    subs = [
        Subgroup(elements=tuple(e.tolist()), order=len(e), index=n // len(e)) for e in found.values()
    ]
    subs.sort(key=lambda s: (s.order, s.elements))
    return subs


def _mask_int(elems: np.ndarray) -> int:
    mask = 0
    for e in elems.tolist():
        mask |= 1 << e
    return mask


def _pair_join_generators(t, ident, elems, in_h) -> list[int]:
    gens: list[int] = []
    covered = np.zeros(in_h.shape[0], dtype=bool)
    covered[ident] = True
    for e in elems.tolist():
        if not covered[e]:
            gens.append(int(e))
            # close the current generator set
            members = np.zeros(in_h.shape[0], dtype=bool)
            members[ident] = True
            garr = np.asarray(gens, dtype=np.int64)
            members[garr] = True
            frontier = np.nonzero(members)[0]
            while frontier.size:
                prods = np.unique(t[np.ix_(frontier, garr)])
                frontier = prods[~members[prods]]
                members[frontier] = True
            covered = members
            if covered[elems].all():
                break
    return gens


def _is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    fac = factorize(n)
    return len(fac) == 1


def subgroup_from_generators(G: FiniteMatrixGroup, generators) -> Subgroup:
    """The subgroup generated by the given matrices (or element indices)."""
    idxs = []
    for g in generators:
        if isinstance(g, int):
            if not 0 <= g < G.order:
                raise ValidationError(f"element index out of range: {g}")
            idxs.append(g)
        else:
            mat = tuple(tuple(int(x) % G.modulus for x in row) for row in g)
            if mat not in G._index:
                raise ValidationError(f"matrix is not an element of the group: {g}")
            idxs.append(G._index[mat])
    lat = _Lattice(G)
    elems = lat.closure([G.identity], idxs)
    return Subgroup(elements=tuple(elems.tolist()), order=len(elems), index=G.order // len(elems))


def diamond_order(G: FiniteMatrixGroup, H: Subgroup, p: int) -> int:
    """|H^diamond|: order of the maximal abelian quotient of H coprime
    to p (the p'-part of H / [H, H])."""
    if not is_prime(p):
        raise ValidationError(f"p must be prime, got {p}")
    lat = _Lattice(G)
    elems = np.array(H.elements, dtype=np.int32)
    gens = _greedy_generators(lat, elems)
    mask = lat.mask_of(elems)
    lat.entries[mask] = (elems, gens)
    der = lat.derived_mask(mask)
    der_order = bin(der).count("1")
    ab = H.order // der_order
    while ab % p == 0:
        ab //= p
    return ab


def h_value(G: FiniteMatrixGroup, H: Subgroup, p: int, digits: int = DEFAULT_PRECISION):
    """h(H) = log2 [G:H] / log2 |H^diamond|; infinity when the diamond
    quotient is trivial, 0 when H = G with a nontrivial diamond."""
    d = diamond_order(G, H, p)
    if d == 1:
        return mpmath.inf
    index = G.order // H.order
    with mpmath.workdps(digits):
        if index == 1:
            return mpmath.mpf(0)
        return mpmath.log(index, 2) / mpmath.log(d, 2)


@dataclass(frozen=True)
class MinHRow:
    q: int
    min_h: object  # mpmath real
    argmin_order: int
    argmin_index: int
    argmin_diamond: int
    subgroup_count: int


def min_h_scan(
    q_list,
    *,
    lie_type: LieType = LieType("A", 1),
    enumeration_bound: int = ENUMERATION_BOUND,
    digits: int = DEFAULT_PRECISION,
    cache_dir: str | None = None,
    enumerator=enumerate_subgroups,
) -> list[MinHRow]:
    """Exact min of h over every subgroup of SL_{rank+1}(F_q) for each q.

    Only type A has a matrix model here; q must be a prime > 3 (the
    theory needs characteristic p > 3, and q = 2, 3 are refused on those
    grounds).
    """
    if lie_type.family != "A" or lie_type.twist != 1:
        raise ValidationError(f"min_h_scan has a matrix model only for untwisted type A, got {lie_type}")
    rows = []
    for q in q_list:
        if not is_prime(q):
            raise ValidationError(f"q must be prime, got {q}")
        if q <= 3:
            raise ValidationError(f"q = {q} refused: the h-minimum theory requires characteristic p > 3")
        degree = lie_type.rank + 1
        G = special_linear_group(degree, q, characteristic_p=q, cache_dir=cache_dir)
        if G.order > enumeration_bound:
            raise ResourceRefusal(
                f"|SL_{degree}(F_{q})| = {G.order} exceeds the enumeration bound {enumeration_bound}",
                bound=enumeration_bound,
                requested=G.order,
            )
        subs = enumerator(G, enumeration_bound=enumeration_bound)
        best = None
        best_key = None
        for H in subs:
            h = h_value(G, H, q, digits=digits)
            key = (h, H.index, H.elements)
            if best_key is None or key < best_key:
                d = diamond_order(G, H, q)
                best_key = key
                best = MinHRow(
                    q=q,
                    min_h=h,
                    argmin_order=H.order,
                    argmin_index=H.index,
                    argmin_diamond=d,
                    subgroup_count=len(subs),
                )
        rows.append(best)
    return rows


@dataclass(frozen=True)
class CongruenceLedger:
    n: int
    modulus_cap: int
    level_counts: dict[int, int]  # level -> subgroups of index <= n at that level
    total: int
    lower_bound: bool = True


def congruence_count_sl2(
    n: int,
    modulus_cap: int = 12,
    *,
    enumeration_bound: int = ENUMERATION_BOUND,
    cache_dir: str | None = None,
) -> CongruenceLedger:
    """Level-deduplicated lower bound for the number of congruence
    subgroups of SL_2(Z) of index at most n, exploring moduli <= cap.

    A subgroup of SL_2(Z/m) is counted at modulus m only if it is not
    the full preimage of its image at any proper divisor of m, which
    makes m its true level; every congruence subgroup of level <= cap is
    then counted exactly once. Levels above the cap are unexplored.
    """
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    if not isinstance(modulus_cap, int) or modulus_cap < 1:
        raise ValidationError(f"modulus cap must be a positive integer, got {modulus_cap!r}")
    for m in range(2, modulus_cap + 1):
        if sl2_order(m) > enumeration_bound:
            raise ResourceRefusal(
                f"|SL_2(Z/{m})| = {sl2_order(m)} exceeds the enumeration bound {enumeration_bound}",
                bound=enumeration_bound,
                requested=sl2_order(m),
            )
    groups = {1: None}
    reductions: dict[tuple[int, int], np.ndarray] = {}
    level_counts: dict[int, int] = {}
    if n >= 1:
        level_counts[1] = 1  # the full group, level 1
    for m in range(2, modulus_cap + 1):
        groups[m] = special_linear_group(2, m, cache_dir=cache_dir)
    for m in range(2, modulus_cap + 1):
        G = groups[m]
        divisors = [d for d in range(2, m) if m % d == 0]
        for d in divisors:
            Gd = groups[d]
            red = np.empty(G.order, dtype=np.int32)
            for i, el in enumerate(G.elements):
                reduced = tuple(tuple(x % d for x in row) for row in el)
                red[i] = Gd._index[reduced]
            reductions[(m, d)] = red
        count = 0
        for H in enumerate_subgroups(G, enumeration_bound=enumeration_bound):
            if H.order == G.order:
                continue  # the full group has level 1, counted once above
            level_is_m = True
            helems = np.array(H.elements, dtype=np.int64)
            for d in divisors:
                image_size = len(np.unique(reductions[(m, d)][helems]))
                kernel_size = G.order // groups[d].order
                if image_size * kernel_size == H.order:
                    level_is_m = False
                    break
            if level_is_m and G.order // H.order <= n:
                count += 1
        if count:
            level_counts[m] = count
    return CongruenceLedger(
        n=n,
        modulus_cap=modulus_cap,
        level_counts=dict(sorted(level_counts.items())),
        total=sum(level_counts.values()),
        lower_bound=True,
    )
