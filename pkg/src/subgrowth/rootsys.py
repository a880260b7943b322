"""Root systems, Dynkin diagrams, and the growth constant gamma.

Everything is generated from Cartan matrices: positive roots by
root-string closure, invariant degrees from the height distribution of
the positive roots, diagram symmetries by a backtracking search over
node permutations. No per-family tables beyond the Cartan matrices
themselves, so the family closed forms stay available as independent
test oracles.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import ValidationError
from .numutil import as_fraction

_FAMILIES = "ABCDEFG"

# Minimal rank accepted per family, before normalization.
_RANK_MIN = {"A": 1, "B": 1, "C": 1, "D": 3, "E": 6, "F": 4, "G": 2}
_RANK_MAX = {"E": 8, "F": 4, "G": 2}

DEFAULT_PRECISION = 50


@dataclass(frozen=True, order=True)
class LieType:
    """A (possibly twisted) simple Lie type.

    Construction normalizes the accidental isomorphisms B1 = C1 = A1 and
    D3 = A3, so equal types compare equal regardless of spelling. Twisted
    types carry the same untwisted root datum as their twist=1 version.
    """

    family: str
    rank: int
    twist: int = 1

    def __post_init__(self):
        fam, rank, twist = self.family, self.rank, self.twist
        if fam not in _FAMILIES:
            raise ValidationError(f"unknown family {fam!r}; expected one of {_FAMILIES}")
        if not isinstance(rank, int) or rank < 1:
            raise ValidationError(f"rank must be a positive integer, got {rank!r}")
        if rank < _RANK_MIN[fam]:
            raise ValidationError(f"{fam}{rank} is not a simple type (need {fam} rank >= {_RANK_MIN[fam]})")
        if fam in _RANK_MAX and rank > _RANK_MAX[fam]:
            raise ValidationError(f"{fam}{rank} is not a simple type (max {fam} rank is {_RANK_MAX[fam]})")
        # Normalize low-rank coincidences before checking the twist.
        if fam in "BC" and rank == 1:
            fam, rank = "A", 1
        elif fam == "D" and rank == 3:
            fam, rank = "A", 3
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "rank", rank)
        if twist not in (1, 2, 3):
            raise ValidationError(f"twist must be 1, 2 or 3, got {twist!r}")
        if twist == 2:
            ok = (fam == "A" and rank >= 2) or (fam == "D" and rank >= 4) or (fam == "E" and rank == 6)
            if not ok:
                raise ValidationError(f"twist 2 requires an order-2 diagram symmetry; {fam}{rank} has none")
        if twist == 3 and not (fam == "D" and rank == 4):
            raise ValidationError("twist 3 exists only for D4")

    @property
    def untwisted(self) -> "LieType":
        return self if self.twist == 1 else LieType(self.family, self.rank)

    def __str__(self):
        prefix = "" if self.twist == 1 else str(self.twist)
        return f"{prefix}{self.family}{self.rank}"


_TYPE_RE = re.compile(r"^\s*(?:\^?([123]))?\s*([A-Ga-g])\s*_?(\d+)\s*$")


def parse_lie_type(text: str) -> LieType:
    """Parse strings like 'A1', '2A3', 'E8', '3D4', 'b_2'."""
    m = _TYPE_RE.match(text)
    if not m:
        raise ValidationError(f"cannot parse Lie type {text!r}; expected e.g. 'A3', '2A3', '3D4'")
    twist = int(m.group(1)) if m.group(1) else 1
    return LieType(m.group(2).upper(), int(m.group(3)), twist)


def cartan_matrix(t: LieType) -> tuple[tuple[int, ...], ...]:
    """Cartan matrix of the untwisted datum, Bourbaki numbering.

    Convention: C[i][j] = 2(a_i, a_j)/(a_j, a_j), so the pairing of a
    root b = sum b_j a_j with the coroot of a_i is sum_j b_j C[j][i].
    """
    t = t.untwisted
    fam, l = t.family, t.rank
    c = [[2 if i == j else 0 for j in range(l)] for i in range(l)]

    def bond(i, j, cij=-1, cji=-1):
        c[i][j] = cij
        c[j][i] = cji

    if fam == "A":
        for i in range(l - 1):
            bond(i, i + 1)
    elif fam == "B":  # a_l short
        for i in range(l - 2):
            bond(i, i + 1)
        bond(l - 2, l - 1, -2, -1)
    elif fam == "C":  # a_l long
        for i in range(l - 2):
            bond(i, i + 1)
        bond(l - 2, l - 1, -1, -2)
    elif fam == "D":
        for i in range(l - 3):
            bond(i, i + 1)
        bond(l - 3, l - 2)
        bond(l - 3, l - 1)
    elif fam == "E":
        # chain 1-3-4-5-6(-7-8), node 2 hangs off node 4
        chain = [0, 2, 3, 4, 5, 6, 7][: l - 1]
        for a, b in zip(chain, chain[1:]):
            bond(a, b)
        bond(1, 3)
    elif fam == "F":
        bond(0, 1)
        bond(1, 2, -2, -1)
        bond(2, 3)
    elif fam == "G":  # a_1 short
        bond(0, 1, -1, -3)
    return tuple(tuple(row) for row in c)


def positive_roots_from_cartan(cartan) -> tuple[tuple[int, ...], ...]:
    """All positive roots of a finite-type Cartan matrix, by root-string
    closure from the simple roots, sorted lexicographically."""
    l = len(cartan)
    simple = [tuple(1 if j == i else 0 for j in range(l)) for i in range(l)]
    found = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(l):
                # length r of the downward a_i-string through beta
                r = 0
                gamma = list(beta)
                while True:
                    gamma[i] -= 1
                    if gamma[i] < 0 or tuple(gamma) not in found:
                        break
                    r += 1
                pairing = sum(b * cartan[j][i] for j, b in enumerate(beta) if b)
                if r - pairing >= 1:
                    up = list(beta)
                    up[i] += 1
                    cand = tuple(up)
                    if cand not in found:
                        found.add(cand)
                        nxt.append(cand)
        frontier = nxt
    return tuple(sorted(found))


def degrees_from_roots(roots) -> tuple[int, ...]:
    """Invariant degrees from the height distribution: the number of
    exponents >= k equals the number of positive roots of height exactly
    k (the height histogram and the exponents are conjugate partitions),
    and each degree is exponent + 1."""
    if not roots:
        return ()
    heights = [sum(r) for r in roots]
    max_h = max(heights)
    count_at = [0] * (max_h + 1)
    for h in heights:
        count_at[h] += 1
    rank = count_at[1]
    exponents = sorted(sum(1 for h in range(1, max_h + 1) if count_at[h] >= i) for i in range(1, rank + 1))
    return tuple(e + 1 for e in exponents)


@dataclass(frozen=True)
class RootSystem:
    lie_type: LieType  # untwisted datum
    cartan: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]
    heights: tuple[int, ...]
    degrees: tuple[int, ...]

    @property
    def simple_roots(self) -> tuple[int, ...]:
        return tuple(range(1, self.lie_type.rank + 1))

    @property
    def rank(self) -> int:
        return self.lie_type.rank


@functools.lru_cache(maxsize=None)
def _build(family: str, rank: int) -> RootSystem:
    t = LieType(family, rank)
    c = cartan_matrix(t)
    roots = positive_roots_from_cartan(c)
    return RootSystem(
        lie_type=t,
        cartan=c,
        positive_roots=roots,
        heights=tuple(sum(r) for r in roots),
        degrees=degrees_from_roots(roots),
    )


def build_root_system(t: LieType) -> RootSystem:
    """Root system of the untwisted datum (twist is ignored)."""
    u = t.untwisted
    return _build(u.family, u.rank)


def positive_root_count(t: LieType) -> int:
    return len(build_root_system(t).positive_roots)


def lie_rank(t: LieType) -> int:
    return t.untwisted.rank


def invariant_degrees(t: LieType) -> tuple[int, ...]:
    return build_root_system(t).degrees


def dimension(t: LieType) -> int:
    """Dimension of the algebraic group: 2|Phi+| + rank."""
    return 2 * positive_root_count(t) + lie_rank(t)


def ratio_R(t: LieType) -> Fraction:
    """R = |Phi+| / rank of the untwisted datum; twist-invariant."""
    return Fraction(positive_root_count(t), lie_rank(t))


def gamma_exact_parts(R) -> tuple[Fraction, Fraction]:
    """The exact pair (R, R+1); gamma = (sqrt(R(R+1)) - R)^2 / (4 R^2)."""
    R = as_fraction(R)
    return (R, R + 1)


def gamma_of_R(R, digits: int = DEFAULT_PRECISION):
    """gamma(R) = (sqrt(R(R+1)) - R)^2 / (4 R^2), as an mpmath real.

    Evaluated through the reciprocal form 1 / (4 (sqrt(R(R+1)) + R)^2),
    which is numerically stable for large R.
    """
    R = as_fraction(R)
    if R < 1:
        raise ValidationError(f"gamma is defined for R >= 1, got {R}")
    if digits < 1:
        raise ValidationError(f"precision must be at least 1 digit, got {digits}")
    with mpmath.workdps(digits + 10):
        x = mpmath.mpf(R.numerator) / mpmath.mpf(R.denominator)
        val = 1 / (4 * (mpmath.sqrt(x * (x + 1)) + x) ** 2)
    with mpmath.workdps(digits):
        return +val


def gamma_of_type(t: LieType, digits: int = DEFAULT_PRECISION):
    return gamma_of_R(ratio_R(t), digits=digits)


@dataclass(frozen=True)
class DynkinDiagram:
    """Nodes are 1..l (Bourbaki). An edge carries its bond multiplicity;
    for multiplicity > 1 the arrow points at the short root."""

    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int, int, int | None], ...]  # (i, j, multiplicity, arrow_to)
    symmetries: tuple[tuple[int, ...], ...]  # node permutations, 1-indexed images


def _automorphisms(cartan) -> list[tuple[int, ...]]:
    """All permutations p of 0..l-1 with C[p(i)][p(j)] = C[i][j]."""
    l = len(cartan)
    out: list[tuple[int, ...]] = []
    # Degree/bond signature pruning keeps this fast even at large rank.
    sig = [tuple(sorted((cartan[i][j], cartan[j][i]) for j in range(l) if j != i and cartan[i][j])) for i in range(l)]

    def extend(partial):
        i = len(partial)
        if i == l:
            out.append(tuple(partial))
            return
        for img in range(l):
            if img in partial or sig[img] != sig[i]:
                continue
            if all(cartan[i][j] == cartan[img][partial[j]] and cartan[j][i] == cartan[partial[j]][img] for j in range(i)):
                partial.append(img)
                extend(partial)
                partial.pop()

    extend([])
    return sorted(out)


def dynkin_diagram(t: LieType) -> DynkinDiagram:
    u = t.untwisted
    c = cartan_matrix(u)
    l = u.rank
    edges = []
    for i in range(l):
        for j in range(i + 1, l):
            if c[i][j]:
                mult = c[i][j] * c[j][i]
                arrow = None
                if mult > 1:
                    arrow = (j if c[i][j] <= -2 else i) + 1
                edges.append((i + 1, j + 1, mult, arrow))
    perms = tuple(tuple(p + 1 for p in perm) for perm in _automorphisms(c))
    return DynkinDiagram(nodes=tuple(range(1, l + 1)), edges=tuple(edges), symmetries=perms)


def diagram_symmetries(t: LieType) -> tuple[tuple[int, ...], ...]:
    """All length-preserving automorphisms of the Dynkin diagram,
    as 1-indexed permutations; twist is ignored."""
    return dynkin_diagram(t).symmetries


def twist_automorphism(t: LieType) -> tuple[int, ...]:
    """The canonical diagram automorphism realizing the twist (1-indexed).

    For 2A_l the end flip, for 2D_l the fork swap, for 2E6 the flip,
    for 3D4 the rotation of the three outer nodes.
    """
    if t.twist == 1:
        return tuple(range(1, t.rank + 1))
    fam, l = t.family, t.rank
    perm = list(range(1, l + 1))
    if t.twist == 3:
        # D4 outer nodes 1, 3, 4 around the center node 2
        perm[0], perm[2], perm[3] = 3, 4, 1
        return tuple(perm)
    if fam == "A":
        return tuple(range(l, 0, -1))
    if fam == "D":
        perm[l - 2], perm[l - 1] = l, l - 1
        return tuple(perm)
    if fam == "E":
        perm[0], perm[5] = 6, 1
        perm[2], perm[4] = 5, 3
        return tuple(perm)
    raise ValidationError(f"no twist automorphism for {t}")
