import math

import mpmath
import numpy as np
import pytest

from subgrowth.errors import ResourceRefusal, ValidationError
from subgrowth.fingrp import (
    CongruenceLedger,
    FiniteMatrixGroup,
    congruence_count_sl2,
    diamond_order,
    enumerate_subgroups,
    enumerate_subgroups_by_pair_joins,
    h_value,
    min_h_scan,
    sl2_order,
    special_linear_group,
    subgroup_from_generators,
)


@pytest.fixture(scope="module")
def sl2_5(cache_dir_module):
    return special_linear_group(2, 5, characteristic_p=5, cache_dir=cache_dir_module)


@pytest.fixture(scope="module")
def cache_dir_module(tmp_path_factory):
    return str(tmp_path_factory.mktemp("fingrp-cache"))


def quaternion_group(cache_dir):
    # i = [[0,-1],[1,0]], j = [[1,1],[1,-1]] generate Q8 inside SL2(Z/3)
    return FiniteMatrixGroup(3, 2, [[[0, -1], [1, 0]], [[1, 1], [1, -1]]], cache_dir=cache_dir)


def test_materialization_and_validation(cache_dir_module):
    G = quaternion_group(cache_dir_module)
    assert G.order == 8
    with pytest.raises(ValidationError):
        FiniteMatrixGroup(4, 2, [[[2, 0], [0, 2]]], cache_dir=cache_dir_module)  # det not a unit
    with pytest.raises(ValidationError):
        FiniteMatrixGroup(1, 2, [[[1, 0], [0, 1]]], cache_dir=cache_dir_module)


def test_element_bound_refusal(cache_dir_module):
    with pytest.raises(ResourceRefusal, match="100 elements"):
        special_linear_group(2, 7, element_bound=100, cache_dir=cache_dir_module)


def test_multiplication_table_is_a_group_table(cache_dir_module):
    G = quaternion_group(cache_dir_module)
    t = G.table()
    e = G.identity
    assert (t[e] == np.arange(8)).all() and (t[:, e] == np.arange(8)).all()
    inv = G.inverses()
    assert all(t[i, inv[i]] == e for i in range(8))
    # associativity spot check
    rng = np.random.default_rng(5)
    for a, b, c in rng.integers(0, 8, size=(50, 3)):
        assert t[t[a, b], c] == t[a, t[b, c]]


def test_table_cache_roundtrip(cache_dir_module):
    G1 = special_linear_group(2, 3, cache_dir=cache_dir_module)
    t1 = G1.table().copy()
    G2 = special_linear_group(2, 3, cache_dir=cache_dir_module)
    assert (G2.table() == t1).all()


def test_q8_subgroup_lattice(cache_dir_module):
    """Hand oracle: 1, the center, three cyclic C4, and Q8 itself."""
    subs = enumerate_subgroups(quaternion_group(cache_dir_module))
    assert [s.order for s in subs] == [1, 2, 4, 4, 4, 8]
    assert len(subs) == 6
    assert all(s.order * s.index == 8 for s in subs)


def test_cyclic_group_subgroups_match_divisors(cache_dir_module):
    # diag(3, 5) has order 6 in SL2(Z/7)
    C6 = FiniteMatrixGroup(7, 2, [[[3, 0], [0, 5]]], cache_dir=cache_dir_module)
    assert C6.order == 6
    assert len(enumerate_subgroups(C6)) == 4


def test_sl2_5_dual_enumeration(sl2_5):
    subs = enumerate_subgroups(sl2_5)
    naive = enumerate_subgroups_by_pair_joins(sl2_5)
    assert subs == naive
    assert len(subs) == 76
    assert all(s.order * s.index == 120 for s in subs)


def test_sl2_z4_dual_enumeration_covers_three_generated(cache_dir_module):
    """SL2(Z/4) contains the mod-2 congruence kernel (C2)^3, which needs
    three generators; both enumerators must find it."""
    G = special_linear_group(2, 4, cache_dir=cache_dir_module)
    subs = enumerate_subgroups(G)
    assert subs == enumerate_subgroups_by_pair_joins(G)
    kernel_orders = [s.order for s in subs if s.order == 8 and s.index == 6]
    assert kernel_orders  # the kernel is there
    # and the kernel is elementary abelian: every element squares to 1
    t = G.table()
    kernel = next(
        s
        for s in subs
        if s.order == 8 and all(t[e, e] == G.identity for e in s.elements)
    )
    assert kernel.index == 6


def test_enumeration_bound_refusal(sl2_5):
    with pytest.raises(ResourceRefusal, match="enumeration bound"):
        enumerate_subgroups(sl2_5, enumeration_bound=50)


def test_diamond_order_perfect_group_is_one(sl2_5):
    full = next(s for s in enumerate_subgroups(sl2_5) if s.order == 120)
    assert diamond_order(sl2_5, full, 5) == 1


def test_diamond_order_cyclic_12(cache_dir_module):
    # 2 has order 12 mod 13; diag(2, 7) generates C12 in SL2(Z/13)
    C12 = FiniteMatrixGroup(13, 2, [[[2, 0], [0, 7]]], cache_dir=cache_dir_module)
    assert C12.order == 12
    full = next(s for s in enumerate_subgroups(C12) if s.order == 12)
    assert diamond_order(C12, full, 2) == 3
    assert diamond_order(C12, full, 3) == 4
    assert diamond_order(C12, full, 5) == 12


def test_borel_of_sl2_5(sl2_5):
    """Upper-triangular subgroup: C5 : C4, abelianization C4."""
    borel = subgroup_from_generators(sl2_5, [[[1, 1], [0, 1]], [[2, 0], [0, 3]]])
    assert borel.order == 20 and borel.index == 6
    assert diamond_order(sl2_5, borel, 5) == 4
    h = h_value(sl2_5, borel, 5, digits=30)
    with mpmath.workdps(30):
        assert abs(h - mpmath.log(6, 2) / mpmath.log(4, 2)) < 1e-20


def test_h_value_conventions(sl2_5, cache_dir_module):
    full = next(s for s in enumerate_subgroups(sl2_5) if s.order == 120)
    assert h_value(sl2_5, full, 5) == mpmath.inf  # |G^diamond| = 1
    C6 = FiniteMatrixGroup(7, 2, [[[3, 0], [0, 5]]], cache_dir=cache_dir_module)
    whole = next(s for s in enumerate_subgroups(C6) if s.order == 6)
    assert h_value(C6, whole, 7) == 0  # index 1, diamond 6 > 1
    trivial = next(s for s in enumerate_subgroups(sl2_5) if s.order == 1)
    assert h_value(sl2_5, trivial, 5) == mpmath.inf


def test_h_value_nonnegative(sl2_5):
    for s in enumerate_subgroups(sl2_5):
        h = h_value(sl2_5, s, 5)
        assert h == mpmath.inf or h >= 0


def test_min_h_scan_small(cache_dir_module):
    rows = min_h_scan([5, 7], cache_dir=cache_dir_module)
    with mpmath.workdps(30):
        for row in rows:
            q = row.q
            # the Borel realizes it: index q+1, diamond q-1 in universal SL2
            expected = mpmath.log(q + 1, 2) / mpmath.log(q - 1, 2)
            assert abs(row.min_h - expected) < 1e-12
            assert row.argmin_order == q * (q - 1)
            assert row.argmin_diamond == q - 1
            assert 0 < row.min_h < 1.5  # below R + 1/2 with R = R(A1) = 1


def test_min_h_scan_second_oracle_agrees(cache_dir_module):
    a = min_h_scan([5], cache_dir=cache_dir_module)[0]
    b = min_h_scan([5], cache_dir=cache_dir_module, enumerator=enumerate_subgroups_by_pair_joins)[0]
    assert a == b


def test_min_h_scan_refuses_small_characteristic(cache_dir_module):
    with pytest.raises(ValidationError, match="characteristic p > 3"):
        min_h_scan([2], cache_dir=cache_dir_module)
    with pytest.raises(ValidationError, match="characteristic p > 3"):
        min_h_scan([3], cache_dir=cache_dir_module)
    with pytest.raises(ValidationError):
        min_h_scan([9], cache_dir=cache_dir_module)  # not prime


def test_min_h_scan_bound_refusal(cache_dir_module):
    with pytest.raises(ResourceRefusal):
        min_h_scan([5], enumeration_bound=100, cache_dir=cache_dir_module)


def test_sl2_order_formula(cache_dir_module):
    for m in (2, 3, 4, 6, 8, 12):
        assert special_linear_group(2, m, cache_dir=cache_dir_module).order == sl2_order(m)


def test_congruence_ledger_examples(cache_dir_module):
    assert congruence_count_sl2(1, 2, cache_dir=cache_dir_module).level_counts == {1: 1}
    ledger = congruence_count_sl2(6, 2, cache_dir=cache_dir_module)
    assert isinstance(ledger, CongruenceLedger)
    # SL2(Z/2) = S3: six subgroups; the full group has level 1, the five
    # proper ones level 2
    assert ledger.level_counts == {1: 1, 2: 5}
    assert ledger.total == 6
    assert ledger.lower_bound


def test_congruence_index_filter(cache_dir_module):
    # at n = 2 only Gamma and the index-2 pullback (C3 <= S3) qualify
    ledger = congruence_count_sl2(2, 2, cache_dir=cache_dir_module)
    assert ledger.level_counts == {1: 1, 2: 1}


def test_congruence_level_assignment_via_pullback(cache_dir_module):
    """The preimage in SL2(Z/4) of the trivial subgroup mod 2 (the mod-2
    congruence kernel) must be assigned level 2, not 4."""
    G4 = special_linear_group(2, 4, cache_dir=cache_dir_module)
    G2 = special_linear_group(2, 2, cache_dir=cache_dir_module)
    kernel_elems = tuple(
        i for i, el in enumerate(G4.elements) if all(x % 2 == (1 if r == c else 0) for r, row in enumerate(el) for c, x in enumerate(row))
    )
    assert len(kernel_elems) == G4.order // G2.order == 8
    big = congruence_count_sl2(10**9, 4, cache_dir=cache_dir_module)
    small = congruence_count_sl2(10**9, 2, cache_dir=cache_dir_module)
    # level-2 counts agree whether or not modulus 4 is explored
    assert big.level_counts[2] == small.level_counts[2]


def test_congruence_level_partition_is_exhaustive(cache_dir_module):
    """Pullback comparison: every subgroup of SL2(Z/m) has a level
    dividing m, so the level counts over divisors must add up to the
    whole lattice."""
    for m, cap_counts in [(4, None), (6, None)]:
        G = special_linear_group(2, m, cache_dir=cache_dir_module)
        total = len(enumerate_subgroups(G))
        ledger = congruence_count_sl2(10**9, m, cache_dir=cache_dir_module)
        covered = sum(c for lv, c in ledger.level_counts.items() if m % lv == 0)
        assert covered == total


def test_congruence_validation(cache_dir_module):
    with pytest.raises(ValidationError):
        congruence_count_sl2(0, 2, cache_dir=cache_dir_module)
    with pytest.raises(ResourceRefusal):
        congruence_count_sl2(10, 12, enumeration_bound=100, cache_dir=cache_dir_module)


@pytest.mark.slow
def test_dual_enumeration_battery(cache_dir_module):
    """The two independent enumeration algorithms agree on every group in
    the battery (orders up to 2000; the SL2(F_q) scan window is covered
    by the acceptance suite)."""
    groups = [
        quaternion_group(cache_dir_module),
        special_linear_group(2, 6, cache_dir=cache_dir_module),
        special_linear_group(2, 7, characteristic_p=7, cache_dir=cache_dir_module),
        special_linear_group(2, 8, cache_dir=cache_dir_module),
        special_linear_group(2, 9, cache_dir=cache_dir_module),
    ]
    for G in groups:
        assert G.order <= 2000
        subs = enumerate_subgroups(G)
        assert subs == enumerate_subgroups_by_pair_joins(G)
        assert all(s.order * s.index == G.order for s in subs)


@pytest.mark.slow
def test_congruence_level_partition_modulus_eight(cache_dir_module):
    G = special_linear_group(2, 8, cache_dir=cache_dir_module)
    total = len(enumerate_subgroups(G))
    ledger = congruence_count_sl2(10**9, 8, cache_dir=cache_dir_module)
    covered = sum(c for lv, c in ledger.level_counts.items() if 8 % lv == 0)
    assert covered == total == 673
