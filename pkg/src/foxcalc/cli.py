"""Command-line front end.

    foxcalc describe --preset Q8
    foxcalc quotient --preset S3 --subgroup "(123)" --kind fox --n 1
    foxcalc subgroup --preset Q8 --subgroup i --module filt-h:1
    foxcalc verify --suite fox2-pushout,third-kernel --report report.json
    foxcalc oracle filtration gamma C2 3

Every command prints one JSON document.  Exit codes: 0 success, 1 a check
failed, 2 invalid input, 3 a size bound was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import checks
from .corpus import CorpusError, load_corpus, resolve_corpus, series_from_terms
from .exactla import FgAbGroup, Lattice, exterior_square, hnf, smith_divisors, tensor, tor
from .groupring import (
    Filtration,
    aug_ideal,
    lattice_product,
    sided_ideal,
    unit_coset_subgroup,
)
from .groups import (
    DEFAULT_MAX_ORDER,
    FiniteGroup,
    GroupError,
    OrderBoundExceeded,
    Subgroup,
    action_series,
    build_preset,
    induced_series,
    load_table,
    lower_central_series,
    parse_subgroup,
)
from .tensorh import RingQuotient, cor32_subgroup, fox_quotient, relative_fox_polynomial, zeta_map

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BOUND = 0, 1, 2, 3
DEFAULT_MAX_DEGREE = 4


class InputError(ValueError):
    pass


class BoundError(ValueError):
    pass


# ---------------------------------------------------------------------------
# shared helpers


def invariants(group: FgAbGroup) -> dict:
    return {"torsion": list(group.torsion), "free_rank": group.free_rank}


def subgroup_text(text: str | None) -> str | None:
    if text is None:
        return None
    return text.strip().strip("⟨⟩<>")


def load_group(args) -> FiniteGroup:
    if bool(args.preset) == bool(args.table):
        raise InputError("give exactly one of --preset and --table")
    if args.preset:
        return build_preset(args.preset, args.max_order)
    return load_table(args.table, args.max_order)


def pick_subgroup(group: FiniteGroup, text: str | None) -> Subgroup:
    text = subgroup_text(text)
    if text is None or text == "*":
        return group.whole
    return parse_subgroup(group, text)


def read_series_file(path: str) -> list:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read series file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"series file {path} is not valid JSON: {exc.msg}") from None
    if isinstance(data, dict):
        data = data.get("terms")
    if not isinstance(data, list) or not all(isinstance(t, str) for t in data):
        raise InputError("a series file holds a JSON list of terms, each a comma separated label list")
    return data


def setup(args):
    """(G, series, H) from the common flags; ``--within`` restricts to a subgroup first."""
    ambient = load_group(args)
    within = getattr(args, "within", None)
    if within:
        k = pick_subgroup(ambient, within)
        group, old = k.as_group()
    else:
        k, group, old = ambient.whole, ambient, None
    kind = args.series or "gamma"
    if kind == "gamma":
        series = lower_central_series(group)
    elif kind == "action":
        series = action_series(k)
        series = series.transport(group, old).validate() if old is not None else series.validate()
    elif kind in ("induced", "intersect"):
        series = induced_series(lower_central_series(ambient), k)
        series = series.transport(group, old).validate() if old is not None else series.validate()
    elif kind.startswith("custom:"):
        series = series_from_terms(group, read_series_file(kind[len("custom:"):]))
    else:
        raise InputError(f"unknown series {kind!r}; use gamma, action, induced or custom:<file>")
    h = pick_subgroup(group, getattr(args, "subgroup", None))
    return group, series, h


def element_labels(group: FiniteGroup, elements) -> list[str]:
    return [group.labels[x] for x in sorted(elements)]


def subgroup_info(group: FiniteGroup, s: Subgroup, verbose: bool) -> dict:
    out = {"order": s.order}
    if verbose or s.order <= 32:
        out["elements"] = element_labels(group, s.elements)
    return out


def lattice_dump(group: FiniteGroup, lat: Lattice) -> list[str]:
    rows = []
    for row in lat.basis:
        terms = []
        for g, c in enumerate(row):
            if c:
                terms.append(f"{c}*{group.labels[g]}")
        rows.append(" + ".join(terms).replace("+ -", "- ") or "0")
    return rows


def check_degree(n: int, args):
    if n < 0:
        raise InputError("--n must be non-negative")
    if n > args.max_degree:
        raise BoundError(f"degree {n} exceeds --max-degree {args.max_degree}")


# ---------------------------------------------------------------------------
# commands


def cmd_describe(args) -> tuple[dict, int]:
    from .groups import AbelianSection, commutator_subgroup
    from .lie import GradedLieRing

    group, series, _ = setup(args)
    lcs = lower_central_series(group)
    ab = AbelianSection(group, group.whole, commutator_subgroup(group.whole, group.whole))
    out = {
        "group": group.name or "table",
        "order": group.order,
        "exponent": group.exponent,
        "abelianization": invariants(ab.target),
        "lower_central_series": [subgroup_info(group, t, args.verbose) for t in lcs.terms],
        "series": {"kind": series.kind, "terms": [subgroup_info(group, t, args.verbose) for t in series.terms]},
    }
    lie = GradedLieRing(group, series)
    out["lie_ring"] = {f"L{n}": invariants(lie.L(n)) for n in (1, 2, 3)}
    if args.verbose:
        out["labels"] = list(group.labels)
    return out, EXIT_OK


def cmd_quotient(args) -> tuple[dict, int]:
    group, series, h = setup(args)
    n = args.n
    check_degree(n, args)
    filt = Filtration(series, n + 1)
    kind = args.kind
    out = {"group": group.name or "table", "kind": kind, "n": n, "H": subgroup_info(group, h, args.verbose)}
    if kind == "fox":
        if n < 1:
            raise InputError("fox quotients start at n = 1")
        q = fox_quotient(filt, n, h)
        out["zeta_surjective"] = zeta_map(filt, n, h).is_surjective() if n >= 2 else None
    elif kind == "aug":
        q = RingQuotient(group, filt[n], filt[n + 1])
    elif kind == "poly":
        q = RingQuotient(group, aug_ideal(group.whole), filt[n + 1])
    elif kind == "rel-poly":
        if n < 1:
            raise InputError("relative Fox polynomial groups start at n = 1")
        normal = pick_subgroup(group, args.normal) if args.normal else group.trivial
        from .groups import is_normal

        if not is_normal(normal):
            raise InputError("--normal must name a normal subgroup")
        q = relative_fox_polynomial(filt, n, normal, h)
        out["N"] = subgroup_info(group, normal, args.verbose)
    else:
        raise InputError(f"unknown quotient kind {kind!r}")
    out["invariants"] = invariants(q.group)
    if args.verbose:
        out["numerator_basis"] = lattice_dump(group, q.big)
        out["denominator_basis"] = lattice_dump(group, q.small)
    return out, EXIT_OK


def module_from_spec(spec: str, group: FiniteGroup, series, h: Subgroup, other: Subgroup):
    """Lattice M of Z(G) for a named construction, plus an optional cross-check."""
    name, _, arg = spec.partition(":")
    if name == "zero":
        return Lattice.zero(group.n), None
    try:
        n = int(arg)
    except ValueError:
        raise InputError(f"module {spec!r} needs an integer degree, e.g. {name}:2") from None
    if n < 0 or n > DEFAULT_MAX_DEGREE:
        raise InputError(f"degree {n} outside 0..{DEFAULT_MAX_DEGREE}")
    filt = Filtration(series, max(n, 1))
    ih = aug_ideal(h)
    if name == "filt":
        return filt[n], None
    if name == "filt-h":
        m = lattice_product(group, filt[n], ih)
        check = None
        if n == 1:
            # G n (1 + I(G)I(H)) against H n (1 + I^2(H))
            big, small = cor32_subgroup(group, h, ih)
            check = ("induced subgroup equals H n (1 + I(H)^2)", big == small, sorted(small))
        return m, check
    if name == "rel":
        m = lattice_product(group, sided_ideal("left", other), ih) + lattice_product(group, filt[n], ih)
        check = None
        if n == 3:
            from .tensorh import fox3_square

            f = fox3_square(Filtration(series, 3), other, h)
            kern = f.square.bottom.kernel_lattice
            elems = {x for x in f.lower.top.elements if list(f.lower.coords(x)) in kern}
            check = ("kernel of x -> x - 1 on H_2/H_4", None, sorted(elems))
        return m, check
    if name == "kfox":
        if n != 2:
            raise InputError("kfox is defined for degree 2 only")
        from .lie import fox2_square

        sq = fox2_square(group, series, h, other)
        kern = sq.square.bottom.kernel_lattice
        elems = {x for x in sq.l2h.top.elements if list(sq.l2h.coords(x)) in kern}
        return sq.target.small, ("kernel of x -> x - 1 on H_2/H_3", None, sorted(elems))
    raise InputError(f"unknown module {spec!r}; use zero, filt:n, filt-h:n, rel:n or kfox:2")


def cmd_subgroup(args) -> tuple[dict, int]:
    group, series, h = setup(args)
    other = pick_subgroup(group, args.normal) if args.normal else group.trivial
    m, check = module_from_spec(args.module, group, series, h, other)
    unit = unit_coset_subgroup(group, m)
    out = {
        "group": group.name or "table",
        "module": args.module,
        "elements": element_labels(group, unit.elements),
        "is_subgroup": unit.is_subgroup,
    }
    code = EXIT_OK
    if check is not None:
        label, verdict, elems = check
        if verdict is None:
            verdict = set(elems) == set(unit.elements)
        out["cross_check"] = {"against": label, "elements": element_labels(group, elems), "agrees": verdict}
        if not verdict:
            code = EXIT_FAIL
    if args.verbose:
        out["module_basis"] = lattice_dump(group, m)
    return out, code


def parse_suites(text: str | None) -> list[str]:
    if not text or text == "all":
        return list(checks.SUITES)
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in names if s not in checks.SUITES]
    if unknown:
        raise InputError(f"unknown suite(s) {unknown}; known: {list(checks.SUITES)}")
    return sorted(set(names), key=list(checks.SUITES).index)


def cmd_verify(args) -> tuple[dict, int]:
    suites = parse_suites(args.suite)
    if args.jobs < 1:
        raise InputError("--jobs must be at least 1")
    entries, base_dir = load_corpus(args.corpus)
    # resolve everything before computing, so bad input never leaves a partial report
    resolved = resolve_corpus(entries, args.max_order, base_dir)
    start = time.perf_counter()
    records = checks.run_suites(entries, suites, args.max_order, base_dir, args.jobs, resolved=resolved if args.jobs == 1 else None)
    total = time.perf_counter() - start
    summary = {s: 0 for s in ("pass", "fail", "skip")}
    for r in records:
        summary[r.status] += 1
    out = {
        "suites": suites,
        "corpus": [e.name for e in resolved],
        "summary": summary,
        "records": [r.payload() for r in records],
    }
    if args.verbose:
        out["records_verbose"] = True
    out["timing"] = {"total_seconds": round(total, 3), "per_record": [round(r.wall, 4) for r in records]}
    return out, EXIT_FAIL if summary["fail"] else EXIT_OK


def parse_abelian(text: str) -> FgAbGroup:
    """'Z/2+Z/4+Z', '0' or 'Z/2xZ/3' style cyclic sums."""
    text = text.strip()
    if text in ("0", "1", ""):
        return FgAbGroup.trivial()
    divisors = []
    for part in text.replace("x", "+").replace("⊕", "+").split("+"):
        part = part.strip()
        if part in ("Z", "ℤ"):
            divisors.append(0)
            continue
        base, _, d = part.partition("/")
        if base not in ("Z", "ℤ") or not d.isdigit() or int(d) < 1:
            raise InputError(f"cannot read abelian group {text!r}; use sums like Z/2+Z/4+Z")
        divisors.append(int(d))
    return FgAbGroup.cyclic_sum(divisors)


def parse_matrix(text: str) -> list[list[int]]:
    try:
        m = json.loads(text)
    except json.JSONDecodeError:
        raise InputError("a matrix is given as JSON, e.g. [[2,4],[6,8]]") from None
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        raise InputError("a matrix is a non-empty JSON list of rows")
    width = len(m[0])
    if any(len(r) != width or not all(isinstance(x, int) for x in r) for r in m):
        raise InputError("matrix rows must be integer lists of equal length")
    return m


def cmd_oracle(args) -> tuple[dict, int]:
    what, params = args.what, args.params
    out: dict = {"oracle": what, "params": params}

    def need(k: int):
        if len(params) != k:
            raise InputError(f"oracle {what} takes {k} parameter(s)")

    if what == "filtration":
        need(3)
        kind, preset, n = params
        kind = {"γ": "gamma"}.get(kind, kind)
        if kind != "gamma":
            raise InputError("the filtration oracle uses the lower central series (gamma)")
        n = int(n) if n.isdigit() else -1
        check_degree(n, args)
        group = build_preset(preset, args.max_order)
        lat = Filtration(lower_central_series(group), max(n, 1))[n]
        out["basis"] = lattice_dump(group, lat)
        out["rank"] = lat.rank
    elif what in ("tensor", "tor"):
        need(2)
        a, b = (parse_abelian(p) for p in params)
        grp = tensor(a, b) if what == "tensor" else tor(a, b)[0]
        out["invariants"] = invariants(grp)
    elif what == "wedge":
        need(1)
        out["invariants"] = invariants(exterior_square(parse_abelian(params[0]))[0])
    elif what in ("hnf", "snf"):
        need(1)
        m = parse_matrix(params[0])
        if what == "hnf":
            h, _ = hnf(m, len(m[0]))
            out["hnf"] = [r for r in h if any(r)]
        else:
            out["divisors"] = smith_divisors(m, len(m[0]))
    elif what == "q3":
        need(3)
        method, preset, sub = params
        group = build_preset(preset, args.max_order)
        h = pick_subgroup(group, sub)
        series = lower_central_series(group)
        if method == "direct":
            q = fox_quotient(Filtration(series, 3), 3, h)
            out["invariants"] = invariants(q.group)
        elif method == "presentation":
            from .lie import FoxContext, delta2

            ctx = FoxContext(group, series, h)
            quot = FgAbGroup(ctx.u3.ngens, list(delta2(ctx).lattice.basis))
            out["invariants"] = invariants(quot)
        else:
            raise InputError("q3 methods: direct (lattices in Z(G)) or presentation (U_3 modulo delta images)")
    else:
        raise InputError(f"unknown oracle {what!r}; use filtration, tensor, tor, wedge, hnf, snf or q3")
    return out, EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="also write the JSON output to this file")
    common.add_argument("--verbose", action="store_true", help="include bases, labels and element lists")
    common.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER, help="largest group order accepted")
    common.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE, help="largest filtration degree accepted")

    grp = argparse.ArgumentParser(add_help=False)
    grp.add_argument("--preset", help="preset group, e.g. cyclic:6, D4, Q8, heisenberg:3, C2xC4")
    grp.add_argument("--table", help="JSON group table file")
    grp.add_argument("--within", help="work inside the subgroup with these generators (for action/induced series)")
    grp.add_argument("--series", default="gamma", help="gamma | action | induced | custom:<file>")
    grp.add_argument("--subgroup", help="comma separated generator labels of H (default: the whole group)")

    parser = argparse.ArgumentParser(prog="foxcalc", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("describe", parents=[common, grp], help="order, series, abelianization and graded Lie ring")

    q = sub.add_parser("quotient", parents=[common, grp], help="invariant factors of a group ring subquotient")
    q.add_argument("--kind", choices=["fox", "aug", "poly", "rel-poly"], default="fox")
    q.add_argument("--n", type=int, default=2)
    q.add_argument("--normal", help="generators of the normal subgroup N for rel-poly")

    s = sub.add_parser("subgroup", parents=[common, grp], help="G n (1 + M) for a named module M")
    s.add_argument("--module", required=True, help="zero | filt:n | filt-h:n | rel:n | kfox:2")
    s.add_argument("--normal", help="generators of N (for rel) or K (for kfox)")

    v = sub.add_parser("verify", parents=[common], help="run verification suites over a corpus")
    v.add_argument("--suite", help="comma separated suite names, or all")
    v.add_argument("--corpus", help="corpus JSON file (default: $FOXCALC_CORPUS, else the built-in corpus)")
    v.add_argument("--jobs", type=int, default=1)

    o = sub.add_parser("oracle", parents=[common], help="brute-force side computations")
    o.add_argument("what", help="filtration | tensor | tor | wedge | hnf | snf | q3")
    o.add_argument("params", nargs="*")
    return parser


COMMANDS = {
    "describe": cmd_describe,
    "quotient": cmd_quotient,
    "subgroup": cmd_subgroup,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def emit(out: dict, args):
    text = json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False)
    print(text)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        out, code = COMMANDS[args.command](args)
    except (OrderBoundExceeded, BoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (InputError, CorpusError, GroupError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        emit(out, args)
    except OSError as exc:
        print(f"error: cannot write report: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
