"""Group descriptors: resolve named groups to their split Lie type,
look up gamma, and classify inner-form field degrees.

The catalog is a fixed table. Only the split type matters for gamma, so
SU(d) and SL(d) both resolve to A_{d-1}, symplectic Sp(2n) to C_n, and
odd/even orthogonal or spin groups to B/D. A real or complex field
marker is accepted and ignored except for D4 over C, which carries a
warning flag (its gamma is still well defined).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .rootsys import DEFAULT_PRECISION, LieType, gamma_of_R, parse_lie_type, ratio_R

_D4_MARKERS = (1, 2, 3, 6)


@dataclass(frozen=True)
class GroupDescriptor:
    """Either a catalog name or a raw Lie type, with an optional form
    marker for D4 (1, 2, 3 or 6)."""

    name: str | None = None
    lie_type: LieType | None = None
    d4_marker: int | None = None
    complex_field: bool = False

    def __post_init__(self):
        if (self.name is None) == (self.lie_type is None):
            raise ValidationError("descriptor needs exactly one of: catalog name, raw LieType")
        if self.d4_marker is not None and self.d4_marker not in _D4_MARKERS:
            raise ValidationError(f"D4 form marker must be one of {_D4_MARKERS}, got {self.d4_marker}")


_NAME_RE = re.compile(
    r"^(?P<fam>SL|SU|SP|SO|SPIN|G2|F4|E6|E7|E8)\s*\(?\s*(?P<deg>\d*)\s*\)?\s*"
    r"(?:[,/]?\s*(?P<field>R|C))?$"
)


def _resolve_name(name: str) -> tuple[LieType, bool]:
    """Catalog name -> (split LieType, complex-field flag)."""
    squashed = name.strip().upper().replace(" ", "")
    m = _NAME_RE.match(squashed)
    if not m:
        raise ValidationError(
            f"unknown group name {name!r}; catalog: SL(d) d>=2, SU(d) d>=3, Sp(2n) n>=1, "
            "SO(n)/Spin(n) n>=5, G2, F4, E6, E7, E8 (optional field marker R or C)"
        )
    fam = m.group("fam")
    deg = int(m.group("deg")) if m.group("deg") else None
    is_complex = m.group("field") == "C"
    if fam in ("G2", "F4", "E6", "E7", "E8"):
        if deg is not None:
            raise ValidationError(f"{fam} takes no degree, got {name!r}")
        return parse_lie_type(fam), is_complex
    if deg is None:
        raise ValidationError(f"{fam} needs a degree, e.g. {fam}(4)")
    if fam == "SL":
        if deg < 2:
            raise ValidationError(f"SL needs degree >= 2, got {deg}")
        return LieType("A", deg - 1), is_complex
    if fam == "SU":
        if deg < 3:
            raise ValidationError(f"SU needs degree >= 3, got {deg}")
        return LieType("A", deg - 1), is_complex
    if fam == "SP":
        if deg < 2 or deg % 2:
            raise ValidationError(f"Sp needs an even degree >= 2, got {deg}")
        return LieType("C", deg // 2) if deg >= 4 else LieType("A", 1), is_complex
    # SO / SPIN
    if deg < 5:
        raise ValidationError(f"{fam} supported for degree >= 5 (simple higher-rank types), got {deg}")
    if deg % 2:
        return LieType("B", (deg - 1) // 2), is_complex
    return LieType("D", deg // 2), is_complex


def parse_descriptor(text: str) -> GroupDescriptor:
    """Parse a catalog name or a raw type string like '2E6' or '6D4'."""
    squashed = text.strip()
    m = re.match(r"^\^?6\s*D\s*_?4$", squashed, re.IGNORECASE)
    if m:
        return GroupDescriptor(lie_type=LieType("D", 4), d4_marker=6)
    try:
        t = parse_lie_type(squashed)
    except ValidationError:
        _resolve_name(squashed)  # validate eagerly
        return GroupDescriptor(name=squashed)
    marker = None
    if (t.family, t.rank) == ("D", 4) and t.twist in (2, 3):
        marker = t.twist
    return GroupDescriptor(lie_type=t, d4_marker=marker)


@dataclass(frozen=True)
class GammaInfo:
    lie_type: LieType
    R: Fraction
    gamma: object  # mpmath real
    warning: str | None = None


def resolve(descr: GroupDescriptor) -> tuple[LieType, bool]:
    if descr.lie_type is not None:
        return descr.lie_type, descr.complex_field
    t, is_complex = _resolve_name(descr.name)
    return t, is_complex or descr.complex_field


def gamma_of_group(descr: GroupDescriptor, digits: int = DEFAULT_PRECISION) -> GammaInfo:
    """gamma of the split form of the descriptor's type; constant across
    all descriptors resolving to the same Lie type."""
    t, is_complex = resolve(descr)
    warning = None
    if (t.family, t.rank) == ("D", 4) and is_complex:
        warning = "D4 over C: the growth limit for 6D4-form lattices is conditional on GRH; gamma itself is unconditional"
    return GammaInfo(lie_type=t.untwisted, R=ratio_R(t), gamma=gamma_of_R(ratio_R(t), digits=digits), warning=warning)


def admissible_inner_form_degrees(t: LieType) -> frozenset[int]:
    """Field degrees [E:k] over which a form of this type can become
    inner: {1, 2} except D4, where triality allows {1, 2, 3, 6}."""
    if (t.untwisted.family, t.untwisted.rank) == ("D", 4):
        return frozenset({1, 2, 3, 6})
    return frozenset({1, 2})


def inner_form_degree(descr: GroupDescriptor) -> frozenset[int]:
    """The exact admissible degree set for the marked form: {1} for inner
    (twist 1), {2} for outer non-D4, and the marker value for D4 forms.
    A D4 marker on any other type is rejected."""
    t, _ = resolve(descr)
    is_d4 = (t.untwisted.family, t.untwisted.rank) == ("D", 4)
    if descr.d4_marker is not None:
        if not is_d4:
            raise ValidationError(f"form marker {descr.d4_marker} only applies to D4, not {t}")
        return frozenset({descr.d4_marker})
    if t.twist == 1:
        return frozenset({1})
    if t.twist == 3:
        return frozenset({3})
    return frozenset({2})
