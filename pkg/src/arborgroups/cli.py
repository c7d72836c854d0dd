"""Command-line front end for the tree-group toolkit.

Subcommands
-----------
orders             cross-checked log2 group orders as CSV
count              exhaustive predicate count for one (n, variant) cell
kernels            direct vs. block-product level-kernel counts
find-params        (p, c) pairs realizing a portrait over small primes
label              build and sign-normalize an exact preimage tree
verify-identities  re-run the labeling identities on a tree
frobenius          Frobenius as a tree automorphism, with membership report
homtest            randomized functional-identity suites
mod2               mod-2 iterate and parameter-polynomial congruences
kummer             finite-field rank report for the discriminant classes

Exit status is 0 when every check performed by the subcommand passes,
1 when a check fails, and 2 on invalid input.  Randomized subcommands
take --seed (falling back to the ARBOR_SEED environment variable, then
0); output is byte-identical for a fixed configuration and seed except
for the wall-clock ``seconds`` column of the counting tables.
"""

import argparse
import csv
import io
import json
import os
import random
import sys

from .automorphisms import TreeAutomorphism, level_words
from .counting import count_predicate, kernel_count, verify_order_table
from .dynamics import (
    LabeledTree,
    find_pcf_params,
    misiurewicz_mod2_matches,
    mod2_iterate_check,
    orbit_portrait,
    preimage_tree,
)
from .fields import build_field
from .functionals import (
    VARIANTS,
    Portrait,
    p_a,
    p_anchors,
    p_b,
    p_value,
    r32,
    r_anchors,
    r_r1,
    r_value,
    sample_member,
)
from .generators import DEFAULT_BUDGET, pink_log2_order
from .labeling import label_tree, verify_identities
from .probe import (
    check_embedding,
    frobenius_automorphism,
    kummer_rank,
    level_product_character,
)

ORDER_HEADER = ["r", "s", "n", "log2_formula", "log2_closure",
                "log2_predicate", "agree"]
COUNT_HEADER = ["r", "s", "n", "variant", "count", "log2", "method", "seconds"]

MOD2_PORTRAITS = ((3, 1), (3, 2), (4, 2), (5, 3))


# ----------------------------------------------------------------------
# output plumbing


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(doc, path):
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", path)


def _dump_csv(header, rows, path):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(buf.getvalue(), path)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def _seed_of(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ARBOR_SEED", "").strip()
    return int(env) if env else 0


def _build_tree(args):
    ctx = build_field(args.p, args.depth)
    return preimage_tree(ctx, args.c, args.x0, args.depth)


def _explicit_case(args, inferred):
    """A non-auto --case different from the inferred one, else None."""
    if args.case in ("auto", inferred):
        return None
    print(
        f"warning: --case {args.case} overrides the inferred case {inferred!r}",
        file=sys.stderr,
    )
    return args.case


def _reject_chebyshev(portrait, what):
    if portrait.case == "chebyshev":
        raise ValueError(f"the (2,1) portrait has no {what}; "
                         "only its closed-form order is available")


# ----------------------------------------------------------------------
# subcommands


def cmd_orders(args):
    portrait = Portrait(args.r, args.s)
    if portrait.case == "chebyshev":
        rows = [
            {"n": n, "log2_formula": pink_log2_order(portrait, n),
             "log2_closure": None, "log2_predicate": None, "agree": True}
            for n in range(1, args.nmax + 1)
        ]
    else:
        rows = verify_order_table(
            portrait, args.nmax, budget=args.budget, workers=args.workers
        )
    table = [
        [args.r, args.s, row["n"], _cell(row["log2_formula"]),
         _cell(row["log2_closure"]), _cell(row["log2_predicate"]),
         _cell(row["agree"])]
        for row in rows
    ]
    _dump_csv(ORDER_HEADER, table, args.out)
    return 0 if all(row["agree"] for row in rows) else 1


def cmd_count(args):
    portrait = Portrait(args.r, args.s)
    _reject_chebyshev(portrait, "predicate groups")
    rep = count_predicate(args.n, args.variant, portrait, workers=args.workers)
    row = [args.r, args.s, args.n, args.variant, rep.count, _cell(rep.log2),
           rep.method, f"{rep.elapsed:.6f}"]
    _dump_csv(COUNT_HEADER, [row], args.out)
    return 0


def cmd_kernels(args):
    portrait = Portrait(args.r, args.s)
    _reject_chebyshev(portrait, "level kernels")
    rows, all_agree = [], True
    for n in range(2, args.nmax + 1):
        rep = kernel_count(portrait, n)
        all_agree &= rep.agree
        rows.append([args.r, args.s, n, rep.kind, rep.count_direct,
                     _cell(rep.log2), "direct+blocks", f"{rep.elapsed:.6f}"])
    _dump_csv(COUNT_HEADER, rows, args.out)
    return 0 if all_agree else 1


def cmd_find_params(args):
    _reject_chebyshev(Portrait(args.r, args.s), "parameter search")
    entries = []
    for p, c in find_pcf_params(args.r, args.s, args.pmax):
        op = orbit_portrait(p, c)
        entries.append(
            {"p": p, "c": c, "r": op.r, "s": op.s, "orbit": list(op.orbit)}
        )
    _dump_json(entries, args.out)
    return 0


def cmd_label(args):
    tree = _build_tree(args)
    if args.raw:
        _dump_json(tree.to_json(), args.out)
        return 0
    labeled, report = label_tree(tree)
    override = _explicit_case(args, labeled.portrait.case)
    if override:
        report = verify_identities(labeled, case=override)
    if args.report:
        _dump_json(report.to_json(), args.report)
    _dump_json(labeled.to_json(), args.out)
    return 0 if report.all_ok else 1


def cmd_verify_identities(args):
    if args.infile:
        with open(args.infile, encoding="utf-8") as fh:
            tree = LabeledTree.from_json(json.load(fh))
        report = verify_identities(tree, case=_explicit_case(args, tree.portrait.case))
    else:
        if None in (args.p, args.c, args.x0, args.depth):
            raise ValueError("need --in FILE, or all of --p/--c/--x0/--depth")
        labeled, report = label_tree(_build_tree(args))
        override = _explicit_case(args, labeled.portrait.case)
        if override:
            report = verify_identities(labeled, case=override)
    _dump_json(report.to_json(), args.out)
    return 0 if report.all_ok else 1


def cmd_frobenius(args):
    labeled, report = label_tree(_build_tree(args))
    sigma = frobenius_automorphism(labeled, q0=args.q0)
    emb = check_embedding(sigma, labeled, labeling=report, q0=args.q0)
    levels = [
        level_product_character(labeled, sigma, n, q0=args.q0)
        for n in range(1, labeled.depth + 1)
    ]
    doc = emb.to_json()
    doc["levels"] = [lv.to_json() for lv in levels]
    _dump_json(doc, args.out)
    return 0 if emb.ok and all(lv.ok for lv in levels) else 1


def cmd_homtest(args):
    portrait = Portrait(args.r, args.s)
    _reject_chebyshev(portrait, "functional identities")
    seed = _seed_of(args)
    rng = random.Random(seed)
    depth, trials = args.depth, args.trials
    nodes = [x for m in range(depth) for x in level_words(m)]
    panchors = list(p_anchors(depth, portrait.r))
    ranchors = list(r_anchors(depth, portrait))

    def suite(check):
        failures = sum(not check() for _ in range(trials))
        return {"trials": trials, "failures": failures}

    def sgn22():
        sig = TreeAutomorphism.random(depth, rng)
        tau = TreeAutomorphism.random(depth, rng)
        prod = sig * tau
        return all(
            prod.par(x) == sig.par(tau.apply(x)) ^ tau.par(x) for x in nodes
        )

    def p_cocycle():
        sig = sample_member(portrait, depth, "Mp", rng)
        tau = TreeAutomorphism.random(depth, rng)
        prod = sig * tau
        pv = p_value(sig, portrait)
        return all(
            p_a(prod, x, portrait) == pv ^ p_a(tau, x, portrait)
            and p_b(prod, x, portrait) == pv ^ p_b(tau, x, portrait)
            for x in panchors
        )

    def p_kernel():
        sig = sample_member(portrait, depth, "tMp", rng)
        return all(
            p_a(sig, x, portrait) == 0 and p_b(sig, x, portrait) == 0
            for x in panchors
        )

    def r_cocycle():
        sig = sample_member(portrait, depth, "tMp", rng)
        tau = TreeAutomorphism.random(depth, rng)
        prod = sig * tau
        rv = r_value(sig, portrait)
        if portrait.case == "special":
            return all(r32(prod, x) == rv ^ r32(tau, x) for x in ranchors)
        return all(
            r_r1(prod, x, portrait.r) == rv ^ r_r1(tau, x, portrait.r)
            for x in ranchors
        )

    suites = {"sgn22": suite(sgn22)}
    if panchors:
        name = "p-cocycle" if portrait.s >= 2 else "p-kernel"
        suites[name] = suite(p_cocycle if portrait.s >= 2 else p_kernel)
    if ranchors:
        name = "r-cocycle" if portrait.case == "special" else "r1-cocycle"
        suites[name] = suite(r_cocycle)

    doc = {
        "portrait": {"r": portrait.r, "s": portrait.s},
        "depth": depth,
        "trials": trials,
        "seed": seed,
        "suites": suites,
    }
    _dump_json(doc, args.out)
    return 0 if all(v["failures"] == 0 for v in suites.values()) else 1


def cmd_mod2(args):
    doc = {
        "nmax": args.nmax,
        "iterates_ok": mod2_iterate_check(args.nmax),
        "portraits": {
            f"{r},{s}": misiurewicz_mod2_matches(r, s) for r, s in MOD2_PORTRAITS
        },
    }
    _dump_json(doc, args.out)
    return 0 if doc["iterates_ok"] and all(doc["portraits"].values()) else 1


def cmd_kummer(args):
    rep = kummer_rank(args.p, args.c, args.x0)
    _dump_json(rep.to_json(), args.out)
    return 0


# ----------------------------------------------------------------------
# argument parsing


def _int_opt(parser, name, required=False, default=None, help=""):
    parser.add_argument(name, type=int, required=required, default=default,
                        help=help)


def _add_out(parser):
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="write output to PATH instead of stdout")


def _add_portrait(parser):
    _int_opt(parser, "--r", required=True, help="preperiod (tail length + 1)")
    _int_opt(parser, "--s", required=True, help="first return index")


def _add_field_point(parser, depth=True):
    _int_opt(parser, "--p", required=True, help="odd prime")
    _int_opt(parser, "--c", required=True, help="map parameter mod p")
    _int_opt(parser, "--x0", required=True, help="base point mod p")
    if depth:
        _int_opt(parser, "--depth", required=True, help="tree depth")


def _add_case(parser):
    parser.add_argument(
        "--case", choices=("auto", "longtail", "special", "shorttail"),
        default="auto",
        help="identity family to check (default: inferred from the orbit)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="arborgroups",
        description="Exact computations with binary-tree automorphism groups "
                    "attached to quadratic critical orbits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orders", help="cross-checked log2 group orders (CSV)")
    _add_portrait(p)
    _int_opt(p, "--nmax", default=5, help="largest depth (default 5)")
    _int_opt(p, "--budget", default=DEFAULT_BUDGET,
             help="closure element budget (default 2^25)")
    _int_opt(p, "--workers", default=1, help="processes for predicate counts")
    _add_out(p)
    p.set_defaults(func=cmd_orders)

    p = sub.add_parser("count", help="exhaustive predicate count (CSV)")
    _add_portrait(p)
    _int_opt(p, "--n", required=True, help="depth, at most 5")
    p.add_argument("--variant", choices=VARIANTS, default="tBp",
                   help="predicate group (default tBp)")
    _int_opt(p, "--workers", default=1, help="processes (shards the scan)")
    _add_out(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("kernels", help="level-kernel counts, two routes (CSV)")
    _add_portrait(p)
    _int_opt(p, "--nmax", default=5, help="largest depth, at most 5")
    _add_out(p)
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("find-params",
                       help="(p, c) pairs with the given orbit portrait (JSON)")
    _add_portrait(p)
    _int_opt(p, "--pmax", default=50, help="largest prime scanned (default 50)")
    _add_out(p)
    p.set_defaults(func=cmd_find_params)

    p = sub.add_parser("label", help="build and sign-normalize a preimage tree")
    _add_field_point(p)
    p.add_argument("--raw", action="store_true",
                   help="emit the unnormalized tree (skip labeling)")
    p.add_argument("--report", metavar="PATH", default=None,
                   help="also write the labeling report to PATH")
    _add_case(p)
    _add_out(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("verify-identities",
                       help="check the labeling identities on a tree")
    p.add_argument("--in", dest="infile", metavar="PATH", default=None,
                   help="tree JSON to verify as-is (skips labeling)")
    _int_opt(p, "--p")
    _int_opt(p, "--c")
    _int_opt(p, "--x0")
    _int_opt(p, "--depth")
    _add_case(p)
    _add_out(p)
    p.set_defaults(func=cmd_verify_identities)

    p = sub.add_parser("frobenius",
                       help="Frobenius as a tree automorphism (JSON)")
    _add_field_point(p)
    _int_opt(p, "--q0", help="Frobenius power q0 = p^k (default p)")
    _add_out(p)
    p.set_defaults(func=cmd_frobenius)

    p = sub.add_parser("homtest", help="randomized functional-identity suites")
    _add_portrait(p)
    _int_opt(p, "--depth", default=5, help="tree depth (default 5)")
    _int_opt(p, "--trials", default=200, help="trials per suite (default 200)")
    _int_opt(p, "--seed", help="RNG seed (default: ARBOR_SEED, then 0)")
    _add_out(p)
    p.set_defaults(func=cmd_homtest)

    p = sub.add_parser("mod2", help="mod-2 iterate and parameter congruences")
    _int_opt(p, "--nmax", default=12, help="largest iterate (default 12)")
    _add_out(p)
    p.set_defaults(func=cmd_mod2)

    p = sub.add_parser("kummer",
                       help="discriminant-class rank over the prime field")
    _add_field_point(p, depth=False)
    _add_out(p)
    p.set_defaults(func=cmd_kummer)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
