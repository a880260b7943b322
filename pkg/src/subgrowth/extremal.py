"""The abelian extremal problem: maximize s_r(A) under r |A|^R <= n.

Two solvers:

* solve_exhaustive: the true maximum over every shape (multiset of
  cyclic orders with value multiplicities <= d) and every admissible r,
  with the budget constraint checked in exact integer arithmetic
  (r^b |A|^a <= n^b for R = a/b, never floats);
* solve_heuristic: a structured family of products of small primes,
  A = prod_{p <= x} (C_p)^{e_p} with e_p <= d, swept over prime cutoffs
  and exponent profiles. Formula-based counting keeps it exact at
  big-integer budgets; the result is a lower bound for the optimum.

The reported ratio is log2(best_count) / lambda(n) with
lambda(n) = (log2 n)^2 / log2 log2 n, all logarithms base 2.
"""

from __future__ import annotations

import csv
import io
import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .abcount import AbelianShape, brute_force_counts, gaussian_binomial, subgroup_counts_by_index
from .errors import ResourceRefusal, ValidationError
from .numutil import as_fraction, first_primes, iroot
from .rootsys import DEFAULT_PRECISION, gamma_of_R

EXHAUSTIVE_BUDGET_BOUND = 10**6
_HALF_LIST_CAP = 1 << 18


@dataclass(frozen=True)
class ExtremalInstance:
    R: Fraction
    d: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "R", as_fraction(self.R))
        if self.R < 1:
            raise ValidationError(f"R must be >= 1, got {self.R}")
        if not isinstance(self.d, int) or self.d < 1:
            raise ValidationError(f"d must be a positive integer, got {self.d!r}")
        if not isinstance(self.n, int) or self.n < 2:
            raise ValidationError(f"n must be an integer >= 2, got {self.n!r}")


@dataclass(frozen=True)
class ExtremalResult:
    best_A: AbelianShape
    best_r: int
    best_count: int
    ratio: object  # mpmath real
    gamma_target: object  # mpmath real
    search_space_note: str


def lambda_n(n: int, digits: int = 30):
    """lambda(n) = (log2 n)^2 / log2 log2 n; 0 at n = 2 by convention."""
    if n < 2:
        raise ValidationError(f"lambda(n) needs n >= 2, got {n}")
    with mpmath.workdps(max(digits, 30)):
        ln = mpmath.log(n, 2)
        if n == 2:
            return mpmath.mpf(0)
        return ln**2 / mpmath.log(ln, 2)


def little_l(n: int, digits: int = 30):
    """l(n) = log2 n / log2 log2 n."""
    if n < 3:
        raise ValidationError(f"l(n) needs n >= 3, got {n}")
    with mpmath.workdps(max(digits, 30)):
        ln = mpmath.log(n, 2)
        return ln / mpmath.log(ln, 2)


def _ratio(best_count: int, n: int, digits: int = 30):
    if best_count <= 1:
        return mpmath.mpf(0)
    with mpmath.workdps(max(digits, 30)):
        return mpmath.log(best_count, 2) / lambda_n(n, digits)


def max_group_order(inst: ExtremalInstance) -> int:
    """Largest |A| admitting some r >= 1, i.e. |A| <= n^(1/R) exactly."""
    a, b = inst.R.numerator, inst.R.denominator
    return iroot(inst.n**b, a)


def max_r(inst: ExtremalInstance, group_order: int) -> int:
    """Largest r with r |A|^R <= n, exact integer arithmetic."""
    a, b = inst.R.numerator, inst.R.denominator
    cap = inst.n**b // group_order**a
    return iroot(cap, b)


def _shapes(limit: int, d: int):
    """All sorted order-multisets with product <= limit, values >= 2 and
    value multiplicities <= d, in ascending lexicographic order."""

    def rec(prefix: tuple[int, ...], prod: int, lo: int):
        yield prefix
        v = lo
        while prod * v <= limit:
            if prefix.count(v) < d:
                yield from rec(prefix + (v,), prod * v, v)
            v += 1

    yield from rec((), 1, 2)


def _smallest_attaining_r(table, r_cap: int) -> int:
    """Smallest r attaining s_{r_cap}: the largest index divisor <= r_cap
    (every divisor of |A| carries at least one subgroup)."""
    best = 1
    for k in table.counts:
        if best < k <= r_cap:
            best = k
    return best


def solve_exhaustive(inst: ExtremalInstance, *, budget_bound: int = EXHAUSTIVE_BUDGET_BOUND) -> ExtremalResult:
    """Exact maximum of s_r(A) over all shapes and admissible r.

    Ties break by smaller |A|, then lexicographically smaller order
    tuple, then smaller r (r canonicalized to the smallest value
    attaining the count).
    """
    if inst.n > budget_bound:
        raise ResourceRefusal(
            f"n = {inst.n} exceeds the exhaustive budget bound {budget_bound}; use solve_heuristic",
            bound=budget_bound,
            requested=inst.n,
        )
    m_cap = max_group_order(inst)
    best_key = None
    best = None
    for orders in _shapes(m_cap, inst.d):
        A = AbelianShape(orders)
        m = A.order
        r_cap = max_r(inst, m)
        if r_cap < 1:
            continue
        table = subgroup_counts_by_index(A)
        count = table.s_n(r_cap)
        r_best = _smallest_attaining_r(table, r_cap)
        key = (-count, m, orders, r_best)
        if best_key is None or key < best_key:
            best_key = key
            best = (A, r_best, count)
    assert best is not None  # the empty shape always qualifies
    A, r_best, count = best
    return ExtremalResult(
        best_A=A,
        best_r=r_best,
        best_count=count,
        ratio=_ratio(count, inst.n),
        gamma_target=gamma_of_R(inst.R),
        search_space_note=f"exhaustive over all shapes with |A|^R <= n (|A| <= {m_cap}), multiplicities <= {inst.d}",
    )


def solve_exhaustive_reference(inst: ExtremalInstance, *, element_bound: int = 10_000) -> ExtremalResult:
    """Independent oracle for solve_exhaustive: reversed enumeration
    order, s_r taken from the brute-force subgroup enumerator, and an
    explicit sweep over every admissible r. Test use only."""
    m_cap = max_group_order(inst)
    candidates = []
    for orders in _shapes(m_cap, inst.d):
        A = AbelianShape(orders)
        r_cap = max_r(inst, A.order)
        if r_cap >= 1:
            candidates.append((A, r_cap))
    best = None
    best_key = None
    for A, r_cap in reversed(candidates):
        table = brute_force_counts(A, element_bound=element_bound)
        divisors = sorted(table.counts)
        running = 0
        count_at_cap = 0
        r_best = 1
        for k in divisors:
            if k > r_cap:
                break
            running += table.counts[k]
            count_at_cap = running
            r_best = k
        key = (-count_at_cap, A.order, A.cyclic_orders, r_best)
        if best_key is None or key < best_key:
            best_key = key
            best = (A, r_best, count_at_cap)
    A, r_best, count = best
    return ExtremalResult(
        best_A=A,
        best_r=r_best,
        best_count=count,
        ratio=_ratio(count, inst.n),
        gamma_target=gamma_of_R(inst.R),
        search_space_note="reference oracle (reversed enumeration, brute-force counts)",
    )


def _profiles(t: int, d: int):
    """Exponent profiles over the first t primes: uniform levels, plus
    two-tier profiles with the higher level on a prime prefix."""
    seen = set()
    for level in range(1, d + 1):
        prof = (level,) * t
        if prof not in seen:
            seen.add(prof)
            yield prof
    if d > 1:
        for cut in range(1, t):
            prof = (d,) * cut + (1,) * (t - cut)
            if prof not in seen:
                seen.add(prof)
                yield prof


def _half_divisor_list(primes, exps, p_tables):
    """All (divisor, subgroup count) pairs for a product of prime blocks,
    sorted by divisor, counts aggregated."""
    items = [(1, 1)]
    for p, e in zip(primes, exps):
        tbl = p_tables[(p, e)]
        items = [(v * p**b, c * cb) for v, c in items for b, cb in tbl]
        if len(items) > 4 * _HALF_LIST_CAP:
            raise ResourceRefusal("half list overflow", bound=_HALF_LIST_CAP)
    items.sort()
    merged = []
    for v, c in items:
        if merged and merged[-1][0] == v:
            merged[-1][1] += c
        else:
            merged.append([v, c])
    return merged


def _structured_s_r(primes, exps, r_cap: int):
    """Exact s_{r_cap} for A = prod (C_p)^{e_p}, or None when the shape
    is too wide for the meet-in-the-middle split. Returns (count, r_best)."""
    p_tables = {}
    for p, e in set(zip(primes, exps)):
        p_tables[(p, e)] = [(b, gaussian_binomial(e, b, p)) for b in range(e + 1)]
    m = 1
    for p, e in zip(primes, exps):
        m *= p**e
    if r_cap >= m:
        total = 1
        for p, e in zip(primes, exps):
            total *= sum(c for _, c in p_tables[(p, e)])
        return total, m
    # meet in the middle on a balanced split by list size
    sizes = [e + 1 for e in exps]
    total_size = 1
    for s in sizes:
        total_size *= s
    if total_size > _HALF_LIST_CAP * _HALF_LIST_CAP:
        return None
    split = 0
    left_size = 1
    while split < len(primes) and left_size * sizes[split] <= max(_HALF_LIST_CAP, iroot(total_size, 2) + 1):
        left_size *= sizes[split]
        split += 1
    try:
        left = _half_divisor_list(primes[:split], exps[:split], p_tables)
        right = _half_divisor_list(primes[split:], exps[split:], p_tables)
    except ResourceRefusal:
        return None
    right_vals = [v for v, _ in right]
    prefix = [0]
    for _, c in right:
        prefix.append(prefix[-1] + c)
    count = 0
    r_best = 1
    for v, c in left:
        if v > r_cap:
            break
        hi = bisect_right(right_vals, r_cap // v)
        if hi:
            count += c * prefix[hi]
            r_best = max(r_best, v * right_vals[hi - 1])
    return count, r_best


def solve_heuristic(inst: ExtremalInstance) -> ExtremalResult:
    """Best s_r(A) over the structured family A = prod_{p<=x} (C_p)^{e_p},
    e_p <= d, over a grid of prime cutoffs and exponent profiles, r at
    its budget maximum. A lower bound for the true optimum; shapes whose
    divisor lattice is too wide to count exactly are skipped and noted.
    """
    a, b = inst.R.numerator, inst.R.denominator
    nb = inst.n**b
    # grow the prime pool while even the all-ones profile fits the budget
    primes: list[int] = []
    pool = first_primes(64)
    prod = 1
    idx = 0
    while True:
        if idx >= len(pool):
            pool = first_primes(2 * len(pool))
        p = pool[idx]
        if (prod * p) ** a > nb:
            break
        prod *= p
        primes.append(p)
        idx += 1
    best_key = None
    best = (AbelianShape(()), 1, 1)
    skipped = 0
    for t in range(len(primes) + 1):
        ps = tuple(primes[:t])
        for prof in _profiles(t, inst.d):
            m = 1
            for p, e in zip(ps, prof):
                m *= p**e
            if m**a > nb:
                continue
            r_cap = max_r(inst, m)
            if r_cap < 1:
                continue
            res = _structured_s_r(ps, prof, r_cap)
            if res is None:
                skipped += 1
                continue
            count, r_best = res
            orders = tuple(sorted(p for p, e in zip(ps, prof) for _ in range(e)))
            key = (-count, m, orders, r_best)
            if best_key is None or key < best_key:
                best_key = key
                best = (AbelianShape(orders), r_best, count)
    A, r_best, count = best
    note = f"structured family prod (C_p)^(e_p) over primes p <= {primes[-1] if primes else 1}, e_p <= {inst.d}; lower bound"
    if skipped:
        note += f"; {skipped} profiles skipped (divisor lattice too wide for exact counting)"
    return ExtremalResult(
        best_A=A,
        best_r=r_best,
        best_count=count,
        ratio=_ratio(count, inst.n),
        gamma_target=gamma_of_R(inst.R),
        search_space_note=note,
    )


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    ratio: object
    gamma_target: object
    best_A: AbelianShape
    best_r: int
    best_count: int


def convergence_report(R, d: int, schedule) -> list[ConvergenceRow]:
    """One heuristic solve per budget in the (strictly increasing)
    schedule; rows carry the ratio and the gamma target."""
    schedule = list(schedule)
    if not schedule:
        raise ValidationError("schedule must be nonempty")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValidationError(f"schedule must be strictly increasing, got {schedule}")
    rows = []
    for n in schedule:
        res = solve_heuristic(ExtremalInstance(as_fraction(R), d, n))
        rows.append(
            ConvergenceRow(
                n=n,
                ratio=res.ratio,
                gamma_target=res.gamma_target,
                best_A=res.best_A,
                best_r=res.best_r,
                best_count=res.best_count,
            )
        )
    return rows


def _decimal(x, digits: int) -> str:
    return mpmath.nstr(x, digits, strip_zeros=False)


def report_to_json(rows: list[ConvergenceRow], digits: int = DEFAULT_PRECISION) -> str:
    payload = [
        {
            "n": str(row.n),
            "ratio": _decimal(row.ratio, digits),
            "gamma_target": _decimal(row.gamma_target, digits),
            "best_A": [str(x) for x in row.best_A.cyclic_orders],
            "best_r": str(row.best_r),
        }
        for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def report_to_csv(rows: list[ConvergenceRow], digits: int = DEFAULT_PRECISION) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n", "ratio", "gamma_target", "best_A", "best_r"])
    for row in rows:
        writer.writerow(
            [
                str(row.n),
                _decimal(row.ratio, digits),
                _decimal(row.gamma_target, digits),
                " ".join(str(x) for x in row.best_A.cyclic_orders),
                str(row.best_r),
            ]
        )
    return buf.getvalue()
