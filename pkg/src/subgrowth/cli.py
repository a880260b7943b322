"""Command-line front end.

Every subcommand emits machine-readable output (json by default, csv or
human tables on request). All numeric JSON fields are decimal strings so
big integers and high-precision reals survive any consumer. Identical
inputs produce byte-identical output: key order is fixed and reals are
printed at the configured precision.

Exit codes: 0 success, 1 validation error, 2 resource-bound refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import mpmath

from . import abcount, extremal, fingrp, invariants, parab, rootsys
from .errors import ResourceRefusal, ValidationError
from .numutil import as_fraction

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_REFUSAL = 2


def _mpf_str(x, digits: int) -> str:
    if x == mpmath.inf:
        return "inf"
    return mpmath.nstr(x, digits, strip_zeros=False)


def _frac_str(x: Fraction) -> str:
    return str(x)


def _emit(payload, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        out.write(_to_csv(payload))
    else:
        _emit_human(payload, out)


def _flatten(payload):
    rows = payload.get("rows")
    if isinstance(rows, list) and rows and isinstance(rows[0], dict):
        return rows
    return [payload]


def _to_csv(payload) -> str:
    rows = _flatten(payload)
    buf = io.StringIO()
    fields = []
    for row in rows:
        for k in row:
            if k not in fields and not isinstance(row[k], (dict, list)):
                fields.append(k)
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in fields})
    return buf.getvalue()


def _emit_human(payload, out) -> None:
    def fmt(value, indent=0):
        pad = "  " * indent
        if isinstance(value, dict):
            for k, v in value.items():
                if isinstance(v, (dict, list)):
                    out.write(f"{pad}{k}:\n")
                    fmt(v, indent + 1)
                else:
                    out.write(f"{pad}{k}: {v}\n")
        elif isinstance(value, list):
            for v in value:
                if isinstance(v, (dict, list)):
                    fmt(v, indent)
                    out.write("\n")
                else:
                    out.write(f"{pad}- {v}\n")
        else:
            out.write(f"{pad}{value}\n")

    fmt(payload)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    return data


def _settings(args) -> dict:
    cfg = _load_config(getattr(args, "config", None))
    merged = {
        "precision_digits": 50,
        "enumeration_bound": fingrp.ENUMERATION_BOUND,
        "exhaustive_bound": extremal.EXHAUSTIVE_BUDGET_BOUND,
        "cache_dir": None,
        "format": "json",
    }
    merged.update({k: v for k, v in cfg.items() if k in merged})
    # flags win over the config file
    if getattr(args, "precision", None) is not None:
        merged["precision_digits"] = args.precision
    if getattr(args, "enumeration_bound", None) is not None:
        merged["enumeration_bound"] = args.enumeration_bound
    if getattr(args, "exhaustive_bound", None) is not None:
        merged["exhaustive_bound"] = args.exhaustive_bound
    if getattr(args, "cache_dir", None) is not None:
        merged["cache_dir"] = args.cache_dir
    if getattr(args, "format", None) is not None:
        merged["format"] = args.format
    if merged["format"] not in ("json", "csv", "human"):
        raise ValidationError(f"unknown output format {merged['format']!r}")
    for key in ("precision_digits", "enumeration_bound", "exhaustive_bound"):
        if not isinstance(merged[key], int) or merged[key] < 1:
            raise ValidationError(f"{key} must be a positive integer, got {merged[key]!r}")
    return merged


def _cmd_gamma(args, cfg) -> dict:
    descr = invariants.parse_descriptor(args.group)
    info = invariants.gamma_of_group(descr, digits=cfg["precision_digits"])
    payload = {
        "command": "gamma",
        "input": args.group,
        "type": str(info.lie_type),
        "R": _frac_str(info.R),
        "gamma": _mpf_str(info.gamma, cfg["precision_digits"]),
    }
    if info.warning:
        payload["warning"] = info.warning
    return payload


def _cmd_roots(args, cfg) -> dict:
    t = rootsys.parse_lie_type(args.type)
    rs = rootsys.build_root_system(t)
    diagram = rootsys.dynkin_diagram(t)
    return {
        "command": "roots",
        "type": str(t),
        "positive_root_count": str(len(rs.positive_roots)),
        "rank": str(rs.rank),
        "R": _frac_str(rootsys.ratio_R(t)),
        "degrees": [str(d) for d in rs.degrees],
        "dimension": str(rootsys.dimension(t)),
        "diagram": {
            "nodes": list(diagram.nodes),
            "edges": [
                {"from": i, "to": j, "multiplicity": m, "arrow_to": a} for i, j, m, a in diagram.edges
            ],
        },
        "symmetries": [list(p) for p in diagram.symmetries],
    }


def _cmd_parabolics(args, cfg) -> dict:
    t = rootsys.parse_lie_type(args.type)
    rows = []
    for spec in parab.enumerate_parabolics(t):
        a = parab.asymptotics(spec)
        row = {
            "nodes": " ".join(str(i) for i in spec.nodes) or "-",
            "components": "; ".join(" ".join(map(str, c)) for c in spec.components) or "-",
            "index_exponent": str(a.index_exponent),
            "diamond_exponent": str(a.diamond_exponent),
            "h_limit": _frac_str(a.h_limit) if a.h_limit is not None else "undefined (P = G)",
        }
        if args.exact_index is not None:
            if t.twist != 1:
                raise ValidationError("exact index unsupported for twisted types; use asymptotics")
            row["exact_index"] = str(parab.parabolic_index(spec, args.exact_index))
        rows.append(row)
    payload = {
        "command": "parabolics",
        "type": str(t),
        "q_convention": str(t.twist),
        "rows": rows,
    }
    if args.verify_min:
        report = parab.verify_min_parabolic(t)
        payload["verify_min"] = {
            "min_h": _frac_str(report.min_h),
            "expected_R": _frac_str(report.expected_R),
            "argmin_nodes": [" ".join(map(str, s.nodes)) or "-" for s in report.argmin],
            "verdict": "PASS" if report.passed else "FAIL",
        }
    return payload


def _cmd_count_abelian(args, cfg) -> dict:
    A = abcount.AbelianShape(tuple(args.orders))
    table = abcount.subgroup_counts_by_index(A)
    payload = {
        "command": "count-abelian",
        "orders": [str(x) for x in A.cyclic_orders],
        "group_order": str(A.order),
        "counts_by_index": {str(k): str(v) for k, v in table.counts.items()},
        "total_subgroups": str(table.total()),
    }
    if args.n is not None:
        payload["n"] = str(args.n)
        payload["s_n"] = str(table.s_n(args.n))
    if args.brute_check:
        brute = abcount.brute_force_counts(A)
        payload["brute_check"] = "PASS" if brute == table else "FAIL"
        if brute != table:
            payload["brute_counts"] = {str(k): str(v) for k, v in brute.counts.items()}
    return payload


def _parse_schedule(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        # allow 2^k entries for big budgets
        if "^" in part:
            base, exp = part.split("^")
            out.append(int(base) ** int(exp))
        else:
            out.append(int(part))
    return out


def _extremal_result_payload(res, cfg) -> dict:
    return {
        "best_A": [str(x) for x in res.best_A.cyclic_orders],
        "best_r": str(res.best_r),
        "best_count": str(res.best_count),
        "ratio": _mpf_str(res.ratio, cfg["precision_digits"]),
        "gamma_target": _mpf_str(res.gamma_target, cfg["precision_digits"]),
        "search_space_note": res.search_space_note,
    }


def _cmd_extremal(args, cfg) -> dict:
    R = as_fraction(args.R)
    if args.schedule:
        rows = extremal.convergence_report(R, args.d, _parse_schedule(args.schedule))
        return {
            "command": "extremal",
            "R": _frac_str(R),
            "d": str(args.d),
            "rows": [
                {
                    "n": str(row.n),
                    "ratio": _mpf_str(row.ratio, cfg["precision_digits"]),
                    "gamma_target": _mpf_str(row.gamma_target, cfg["precision_digits"]),
                    "best_A": " ".join(str(x) for x in row.best_A.cyclic_orders),
                    "best_r": str(row.best_r),
                }
                for row in rows
            ],
        }
    if args.n is None:
        raise ValidationError("extremal needs --n N or --schedule")
    inst = extremal.ExtremalInstance(R, args.d, args.n)
    if args.exhaustive:
        res = extremal.solve_exhaustive(inst, budget_bound=cfg["exhaustive_bound"])
        mode = "exhaustive"
    else:
        res = extremal.solve_heuristic(inst)
        mode = "heuristic"
    payload = {"command": "extremal", "mode": mode, "R": _frac_str(R), "d": str(args.d), "n": str(args.n)}
    payload.update(_extremal_result_payload(res, cfg))
    return payload


def _cmd_minh(args, cfg) -> dict:
    q_list = [int(q) for q in args.q_list.split(",") if q.strip()]
    rows = fingrp.min_h_scan(
        q_list,
        enumeration_bound=cfg["enumeration_bound"],
        digits=cfg["precision_digits"],
        cache_dir=cfg["cache_dir"],
    )
    return {
        "command": "minh",
        "type": "A1",
        "rows": [
            {
                "q": str(r.q),
                "min_h": _mpf_str(r.min_h, cfg["precision_digits"]),
                "argmin": f"order {r.argmin_order}, index {r.argmin_index}, diamond {r.argmin_diamond}",
                "subgroup_count": str(r.subgroup_count),
            }
            for r in rows
        ],
    }


def _cmd_congruence(args, cfg) -> dict:
    ledger = fingrp.congruence_count_sl2(
        args.n,
        args.modulus_cap,
        enumeration_bound=cfg["enumeration_bound"],
        cache_dir=cfg["cache_dir"],
    )
    return {
        "command": "congruence",
        "n": str(ledger.n),
        "modulus_cap": str(ledger.modulus_cap),
        "rows": [{"level": str(lv), "count": str(c)} for lv, c in ledger.level_counts.items()],
        "total": str(ledger.total),
        "lower_bound": "true",
    }


def _selfcheck(cfg) -> tuple[dict, bool]:
    """Oracle-equivalence battery across every module; small scale."""
    from fractions import Fraction

    checks: list[tuple[str, bool]] = []

    # rootsys: closed forms vs generator
    closed = {"A": lambda l: l * (l + 1) // 2, "B": lambda l: l * l, "C": lambda l: l * l, "D": lambda l: l * (l - 1)}
    ok = True
    for fam, form in closed.items():
        lo = {"A": 1, "B": 2, "C": 2, "D": 4}[fam]
        for l in range(lo, 9):
            ok &= rootsys.positive_root_count(rootsys.LieType(fam, l)) == form(l)
    for name, count in [("G2", 6), ("F4", 24), ("E6", 36), ("E7", 63), ("E8", 120)]:
        ok &= rootsys.positive_root_count(rootsys.parse_lie_type(name)) == count
    checks.append(("rootsys: closure generation matches family closed forms", ok))
    ok = all(
        sum(d - 1 for d in rootsys.invariant_degrees(t)) == rootsys.positive_root_count(t)
        for t in (rootsys.parse_lie_type(s) for s in ["A5", "B6", "C4", "D7", "E8", "F4", "G2"])
    )
    checks.append(("rootsys: degree/positive-root consistency", ok))

    # parab: Proposition-2 scan over all types of rank <= 8, all twists
    ok = True
    for t in _all_types(8):
        ok &= parab.verify_min_parabolic(t).passed
    checks.append(("parab: Borel uniquely minimizes h over proper parabolics (rank <= 8)", ok))
    ok = parab.group_order(rootsys.parse_lie_type("A1"), 5) == 120
    ok &= parab.group_order(rootsys.parse_lie_type("2A2"), 2) == 216
    checks.append(("parab: group-order spot values", ok))

    # abcount: formula vs brute force
    ok = True
    for orders in [(2, 2), (2, 4), (12,), (3, 3), (2, 2, 2), (6, 10), (4, 4), (30,), (8, 2), (9, 3)]:
        A = abcount.AbelianShape(orders)
        ok &= abcount.subgroup_counts_by_index(A) == abcount.brute_force_counts(A)
    checks.append(("abcount: formula path equals brute-force path (battery)", ok))

    # extremal: exhaustive vs independent oracle
    ok = True
    for R, d, n in [(Fraction(1), 1, 64), (Fraction(2), 1, 100), (Fraction(3, 2), 2, 64)]:
        inst = extremal.ExtremalInstance(R, d, n)
        a = extremal.solve_exhaustive(inst)
        b = extremal.solve_exhaustive_reference(inst)
        ok &= (a.best_A, a.best_r, a.best_count) == (b.best_A, b.best_r, b.best_count)
        h = extremal.solve_heuristic(inst)
        ok &= h.best_count <= a.best_count
    checks.append(("extremal: exhaustive equals double-brute-force oracle; heuristic below", ok))

    # fingrp: dual enumeration + congruence lattice
    G = fingrp.special_linear_group(2, 5, characteristic_p=5, cache_dir=cfg["cache_dir"])
    ok = fingrp.enumerate_subgroups(G) == fingrp.enumerate_subgroups_by_pair_joins(G)
    Q8 = fingrp.FiniteMatrixGroup(3, 2, [[[0, -1], [1, 0]], [[1, 1], [1, -1]]], cache_dir=cfg["cache_dir"])
    ok &= len(fingrp.enumerate_subgroups(Q8)) == 6
    checks.append(("fingrp: two independent enumerators agree (SL2(F5), Q8)", ok))
    ledger = fingrp.congruence_count_sl2(6, 2, cache_dir=cfg["cache_dir"])
    checks.append(("fingrp: S3 congruence ledger at cap 2", ledger.level_counts == {1: 1, 2: 5}))

    # invariants vs rootsys
    ok = True
    for name in ["SL(2)", "SL(5)", "SU(4)", "Sp(8)", "SO(9)", "Spin(10)", "G2", "F4", "E6", "E7", "E8"]:
        info = invariants.gamma_of_group(invariants.parse_descriptor(name), digits=30)
        delta = abs(info.gamma - rootsys.gamma_of_type(info.lie_type, 30))
        ok &= delta < mpmath.mpf(10) ** -12
    checks.append(("invariants: catalog gamma matches root-system gamma to 1e-12", ok))

    passed = all(ok for _, ok in checks)
    payload = {
        "command": "selfcheck",
        "rows": [{"check": name, "status": "PASS" if ok else "FAIL"} for name, ok in checks],
        "verdict": "PASS" if passed else "FAIL",
    }
    return payload, passed


def _all_types(max_rank: int):
    for l in range(1, max_rank + 1):
        yield rootsys.LieType("A", l)
        if l >= 2:
            yield rootsys.LieType("A", l, 2)
    for fam in "BC":
        for l in range(2, max_rank + 1):
            yield rootsys.LieType(fam, l)
    for l in range(4, max_rank + 1):
        yield rootsys.LieType("D", l)
        yield rootsys.LieType("D", l, 2)
    yield rootsys.LieType("D", 4, 3)
    for l in (6, 7, 8):
        yield rootsys.LieType("E", l)
    yield rootsys.LieType("E", 6, 2)
    yield rootsys.LieType("F", 4)
    yield rootsys.LieType("G", 2)


class _Parser(argparse.ArgumentParser):
    """Usage errors become validation errors (exit code 1), keeping exit
    code 2 reserved for resource refusals."""

    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="subgrowth",
        description="Exact subgroup-growth invariants: root data, parabolic exponents, abelian counts, extremal solvers.",
    )
    parser.add_argument("--format", choices=["json", "csv", "human"], default=None, help="output format (default json)")
    parser.add_argument("--precision", type=int, default=None, help="decimal digits for real output (default 50)")
    parser.add_argument("--enumeration-bound", type=int, default=None, help="max group order for subgroup enumeration")
    parser.add_argument("--exhaustive-bound", type=int, default=None, help="max n for the exhaustive extremal solver")
    parser.add_argument("--cache-dir", default=None, help="multiplication-table cache directory (env SUBGROWTH_CACHE_DIR)")
    parser.add_argument("--config", default=None, help="JSON config file; flags win over the file")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gamma", help="R and gamma for a Lie type or named group")
    p.add_argument("group", help="e.g. A1, 2E6, SL(4), Sp(6), Spin(10)")

    p = sub.add_parser("roots", help="positive roots, degrees, diagram, symmetries")
    p.add_argument("type", help="Lie type, e.g. E8 or 2A3")

    p = sub.add_parser("parabolics", help="parabolic exponents and h limits")
    p.add_argument("type")
    p.add_argument("--verify-min", action="store_true", help="check min h = R uniquely at the Borel")
    p.add_argument("--exact-index", type=int, default=None, metavar="Q", help="exact [G:P](q) column (untwisted only)")

    p = sub.add_parser("count-abelian", help="subgroup counts by index for an abelian group")
    p.add_argument("orders", type=int, nargs="+", help="cyclic factor orders, e.g. 2 4")
    p.add_argument("--n", type=int, default=None, help="also report s_n")
    p.add_argument("--brute-check", action="store_true", help="cross-check against the brute-force oracle")

    p = sub.add_parser("extremal", help="extremal abelian subgroup counts under r |A|^R <= n")
    p.add_argument("--R", required=True, help="exponent as a fraction, e.g. 1 or 3/2")
    p.add_argument("--d", type=int, required=True, help="max multiplicity of each cyclic order")
    p.add_argument("--n", type=int, default=None, help="budget")
    p.add_argument("--exhaustive", action="store_true", help="exact search (default: heuristic)")
    p.add_argument("--heuristic", action="store_true", help="structured-family search (default)")
    p.add_argument("--schedule", default=None, help="comma-separated budgets (2^k allowed) for a convergence report")

    p = sub.add_parser("minh", help="min h(H) over all subgroups of SL2(F_q)")
    p.add_argument("--q-list", required=True, help="comma-separated primes > 3, e.g. 5,7,11,13")

    p = sub.add_parser("congruence", help="level-deduplicated congruence-subgroup ledger for SL2(Z)")
    p.add_argument("--modulus-cap", type=int, default=12, metavar="M")
    p.add_argument("--n", type=int, required=True, help="index bound")

    sub.add_parser("selfcheck", help="run the oracle-equivalence battery")
    return parser


_COMMANDS = {
    "gamma": _cmd_gamma,
    "roots": _cmd_roots,
    "parabolics": _cmd_parabolics,
    "count-abelian": _cmd_count_abelian,
    "extremal": _cmd_extremal,
    "minh": _cmd_minh,
    "congruence": _cmd_congruence,
}


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _settings(args)
        if args.subcommand == "selfcheck":
            payload, passed = _selfcheck(cfg)
            _emit(payload, cfg["format"], out)
            return EXIT_OK if passed else EXIT_VALIDATION
        payload = _COMMANDS[args.subcommand](args, cfg)
        _emit(payload, cfg["format"], out)
        return EXIT_OK
    except ResourceRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
