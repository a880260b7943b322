"""Standard parabolic subgroups as Dynkin node subsets.

A parabolic is encoded by the subset S of simple roots kept in the Levi.
For twisted types only tau-invariant subsets occur. The asymptotic
exponents are

    index exponent   = |Phi+| - sum |E_i|
    diamond exponent = rank   - sum |C_i|

over the connected components C_i of S, with E_i the positive roots in
the span of C_i; their ratio is the exact-rational limit of h(P) as the
field grows. Exact indices (untwisted only) come from the quotient of
Poincare polynomials W(q) / W_S(q).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .numutil import as_fraction
from .rootsys import (
    LieType,
    build_root_system,
    cartan_matrix,
    degrees_from_roots,
    invariant_degrees,
    lie_rank,
    positive_root_count,
    positive_roots_from_cartan,
    ratio_R,
    twist_automorphism,
)


@dataclass(frozen=True)
class ParabolicSpec:
    base_type: LieType
    nodes: tuple[int, ...]  # sorted subset of 1..rank
    components: tuple[tuple[int, ...], ...]  # maximal connected subsets, sorted
    component_root_counts: tuple[int, ...]  # |E_i| per component
    twist_invariant: bool

    @property
    def is_proper(self) -> bool:
        return len(self.nodes) < lie_rank(self.base_type)

    @property
    def is_borel(self) -> bool:
        return not self.nodes


@dataclass(frozen=True)
class ParabolicAsymptotics:
    index_exponent: int
    diamond_exponent: int
    h_limit: Fraction | None  # absent for the improper parabolic P = G
    q_convention: int  # |F| = q^e with e the twist order


@functools.lru_cache(maxsize=None)
def _sub_cartan_data(sub: tuple[tuple[int, ...], ...]) -> tuple[int, tuple[int, ...]]:
    """(positive-root count, degrees) of an induced Cartan submatrix."""
    roots = positive_roots_from_cartan(sub)
    return len(roots), degrees_from_roots(roots)


def _induced_cartan(cartan, nodes0: tuple[int, ...]):
    return tuple(tuple(cartan[i][j] for j in nodes0) for i in nodes0)


def _components(cartan, nodes0: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    remaining = set(nodes0)
    comps = []
    while remaining:
        seed = min(remaining)
        comp = {seed}
        frontier = [seed]
        while frontier:
            i = frontier.pop()
            for j in remaining - comp:
                if cartan[i][j]:
                    comp.add(j)
                    frontier.append(j)
        comps.append(tuple(sorted(comp)))
        remaining -= comp
    return tuple(sorted(comps))


def parabolic_spec(t: LieType, nodes) -> ParabolicSpec:
    """Build the spec for the subset of Dynkin nodes kept in the Levi."""
    l = lie_rank(t)
    node_set = sorted(set(nodes))
    if any(not isinstance(i, int) or i < 1 or i > l for i in node_set):
        raise ValidationError(f"nodes must be a subset of 1..{l}, got {sorted(nodes)}")
    tau_ok = True
    if t.twist > 1:
        tau = twist_automorphism(t)
        tau_ok = {tau[i - 1] for i in node_set} == set(node_set)
        if not tau_ok:
            raise ValidationError(f"subset {node_set} is not invariant under the twist symmetry of {t}")
    c = cartan_matrix(t)
    nodes0 = tuple(i - 1 for i in node_set)
    comps0 = _components(c, nodes0)
    counts = tuple(_sub_cartan_data(_induced_cartan(c, comp))[0] for comp in comps0)
    return ParabolicSpec(
        base_type=t,
        nodes=tuple(node_set),
        components=tuple(tuple(i + 1 for i in comp) for comp in comps0),
        component_root_counts=counts,
        twist_invariant=tau_ok,
    )


def enumerate_parabolics(t: LieType, proper_only: bool = False) -> list[ParabolicSpec]:
    """All standard parabolics (tau-invariant subsets for twisted types),
    in bitmask order of the node subset."""
    l = lie_rank(t)
    tau = twist_automorphism(t) if t.twist > 1 else None
    out = []
    for mask in range(1 << l):
        nodes = [i + 1 for i in range(l) if mask >> i & 1]
        if tau is not None and {tau[i - 1] for i in nodes} != set(nodes):
            continue
        if proper_only and len(nodes) == l:
            continue
        out.append(parabolic_spec(t, nodes))
    return out


def asymptotics(p: ParabolicSpec) -> ParabolicAsymptotics:
    t = p.base_type
    index_exp = positive_root_count(t) - sum(p.component_root_counts)
    diamond_exp = lie_rank(t) - sum(len(c) for c in p.components)
    h = Fraction(index_exp, diamond_exp) if diamond_exp else None
    return ParabolicAsymptotics(index_exp, diamond_exp, h, t.twist)


def h_limit(p: ParabolicSpec) -> Fraction:
    a = asymptotics(p)
    if a.h_limit is None:
        raise ValidationError("h undefined for P = G (the improper parabolic)")
    return a.h_limit


def mediant_step(a, b, c, d) -> Fraction:
    """(a-b)/(c-d) for positive rationals with a > b, c > d, a/c > b/d.
    The result always exceeds a/c, which drives the minimality argument
    for the Borel subgroup."""
    a, b, c, d = (as_fraction(x) for x in (a, b, c, d))
    if min(a, b, c, d) <= 0:
        raise ValidationError("mediant_step needs positive arguments")
    if not (a > b and c > d):
        raise ValidationError("mediant_step needs a > b and c > d")
    if not a * d > b * c:
        raise ValidationError("mediant_step needs a/c > b/d")
    return (a - b) / (c - d)


@dataclass(frozen=True)
class MinParabolicReport:
    lie_type: LieType
    expected_R: Fraction
    min_h: Fraction
    argmin: tuple[ParabolicSpec, ...]
    passed: bool  # min_h == R and the unique argmin is the Borel

    @property
    def counterexamples(self) -> tuple[ParabolicSpec, ...]:
        return () if self.passed else self.argmin


def verify_min_parabolic(t: LieType) -> MinParabolicReport:
    """Exact-rational minimum of h over proper parabolics, with the
    claim min = R(t), uniquely at the Borel, checked by exhaustive scan."""
    best: Fraction | None = None
    argmin: list[ParabolicSpec] = []
    for p in enumerate_parabolics(t, proper_only=True):
        h = h_limit(p)
        if best is None or h < best:
            best, argmin = h, [p]
        elif h == best:
            argmin.append(p)
    assert best is not None
    r = ratio_R(t)
    passed = best == r and len(argmin) == 1 and argmin[0].is_borel
    return MinParabolicReport(t, r, best, tuple(argmin), passed)


def group_order(t: LieType, q: int) -> int:
    """Order of the universal (simply connected) group of type t over the
    field with q^twist elements; exact integer."""
    if not isinstance(q, int) or q < 2:
        raise ValidationError(f"q must be an integer >= 2, got {q!r}")
    n_pos = positive_root_count(t)
    degrees = invariant_degrees(t)
    if t.twist == 1:
        order = q**n_pos
        for d in degrees:
            order *= q**d - 1
        return order
    if t.twist == 3:  # 3D4
        return q**12 * (q**8 + q**4 + 1) * (q**6 - 1) * (q**2 - 1)
    # Steinberg twists: signs of the graph automorphism on the invariants.
    fam, l = t.family, t.rank
    if fam == "A":
        signs = {d: (-1) ** d for d in degrees}
        factors = [q**d - (-1) ** d for d in degrees]
    elif fam == "D":
        factors = [q ** (2 * i) - 1 for i in range(1, l)]
        factors.append(q**l + 1)
    else:  # 2E6
        factors = [q**d - (1 if d % 2 == 0 else -1) for d in degrees]
    order = q**n_pos
    for f in factors:
        order *= f
    return order


def borel_order(t: LieType, q: int) -> int:
    """Order of the Borel subgroup of the universal untwisted group:
    q^{|Phi+|} (q-1)^rank."""
    if t.twist != 1:
        raise ValidationError("borel_order is implemented for untwisted types only")
    if not isinstance(q, int) or q < 2:
        raise ValidationError(f"q must be an integer >= 2, got {q!r}")
    return q ** positive_root_count(t) * (q - 1) ** lie_rank(t)


def _poincare_value(degrees, q: int) -> int:
    """W(q) = prod (q^d - 1)/(q - 1), evaluated exactly."""
    val = 1
    for d in degrees:
        val *= (q**d - 1) // (q - 1)
    return val


def parabolic_index(p: ParabolicSpec, q: int) -> int:
    """Exact index [G : P](q) = W(q) / W_S(q) for untwisted types; a monic
    polynomial in q of degree |Phi+| - sum |E_i|."""
    t = p.base_type
    if t.twist != 1:
        raise ValidationError("exact index unsupported for twisted types; use asymptotics")
    if not isinstance(q, int) or q < 2:
        raise ValidationError(f"q must be an integer >= 2, got {q!r}")
    num = _poincare_value(invariant_degrees(t), q)
    den = 1
    c = cartan_matrix(t)
    for comp in p.components:
        sub = _induced_cartan(c, tuple(i - 1 for i in comp))
        den *= _poincare_value(_sub_cartan_data(sub)[1], q)
    assert num % den == 0
    return num // den
