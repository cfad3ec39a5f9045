"""Command line interface.

Exit codes: 0 success or verified, 1 verification failed, 2 bad input,
3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import arithmetic, atoms, verify
from .errors import CapacityError, DomainError, ValidationError
from .group import FiniteGroup, load_group
from .sequence import classify, load_sequence, smoothness

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


def _read(value: str) -> str:
    """``@path`` reads a file, ``-`` reads stdin, anything else is literal."""
    if value == "-":
        return sys.stdin.read()
    if value.startswith("@"):
        try:
            with open(value[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read {value[1:]}: {exc}") from None
    return value


def _group(args) -> FiniteGroup:
    return load_group(_read(args.group))


def _seq(args, G):
    return load_sequence(G, _read(args.seq))


def _names(G: FiniteGroup, es) -> list[str]:
    return [G.names[x] for x in es]


def _emit(args, payload, text: str | None = None) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text if text is not None else payload)


def _brace(items) -> str:
    return "{" + ", ".join(items) + "}"


# -- subcommands --------------------------------------------------------------------


def cmd_group(args) -> int:
    G = _group(args)
    if args.format == "json":
        print(json.dumps(G.to_json(), sort_keys=True))
        return EXIT_OK
    print(f"{G.label()}  order {G.order}  exponent {G.exponent}  abelian {G.is_abelian}")
    for x in range(G.order):
        print(f"  {x:3d}  {G.names[x]:<10}  order {G.orders[x]}  inverse {G.names[G.inverses[x]]}")
    return EXIT_OK


def cmd_pi(args) -> int:
    G = _group(args)
    S = _seq(args, G)
    if args.sums:
        es = S.sigma(args.length)
        what = "Sigma" if args.length is None else f"Sigma_{args.length}"
    elif args.subsequences or args.length is not None:
        es = S.subsequence_products(args.length)
        what = "Pi" if args.length is None else f"Pi_{args.length}"
    else:
        es = S.product_set()
        what = "pi"
    names = _names(G, es)
    _emit(args, {"sequence": str(S), "set": what, "elements": names}, _brace(names))
    return EXIT_OK


def cmd_classify(args) -> int:
    G = _group(args)
    S = _seq(args, G)
    out = {"sequence": str(S), "length": len(S), **classify(S)}
    out["atom"] = atoms.is_atom(S).is_atom
    if G.is_abelian and G.is_cyclic and len(S):
        cert = smoothness(S)
        out["smooth"] = None if cert is None else {
            "g": G.names[cert.g], "coefficients": list(cert.coefficients), "m": cert.m}
    text = "\n".join(f"{k}: {v}" for k, v in out.items())
    _emit(args, out, text)
    return EXIT_OK


def cmd_atom(args) -> int:
    G = _group(args)
    S = _seq(args, G)
    v = atoms.is_atom(S)
    out = {"sequence": str(S), "product_one": v.is_product_one, "atom": v.is_atom}
    if v.split is not None:
        out["split"] = [str(v.split[0]), str(v.split[1])]
    if v.is_product_one:
        order = S.table().ordering()
        out["ordering"] = [G.names[g] for g in order]
    if v.is_atom:
        text = f"atom; product-one ordering: {' * '.join(out['ordering'])}"
    elif v.split is not None:
        text = f"not an atom; split {out['split'][0]} | {out['split'][1]}"
    else:
        text = "not an atom; not product-one"
    _emit(args, out, text)
    return EXIT_OK


def cmd_davenport(args) -> int:
    G = _group(args)
    if args.small:
        value, witness = atoms.small_davenport(G)
        name = "d"
    else:
        value, witness = atoms.large_davenport(G, strategy=args.strategy, jobs=args.jobs)
        name = "D"
    _emit(args, {"group": G.label(), "invariant": name, "value": value, "witness": str(witness)}, str(value))
    return EXIT_OK


def cmd_census(args) -> int:
    G = _group(args)
    alphabet = None
    if args.reflections:
        alphabet = verify._Presentation(G).reflections
    if args.length is None:
        res = atoms.max_atom_census(G, alphabet=alphabet, jobs=args.jobs)
    else:
        res = atoms.atom_census(G, args.length, alphabet=alphabet, jobs=args.jobs)
    rows = res.records(expand=args.expand_orbits, timings=args.timings)
    if args.format == "json":
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    elif args.format == "csv":
        buf = io.StringIO()
        fields = ["sequence", "orbit_size"] + (["verdict_time_ms"] if args.timings else [])
        w = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        total = sum(r["orbit_size"] for r in rows)
        print(f"{G.label()} length {res.length}: {len(rows)} orbits, {total} atoms")
        for row in rows:
            print(f"  {row['sequence']}  (orbit {row['orbit_size']})")
            for s in row.get("orbit", []):
                print(f"      {s}")
    return EXIT_OK


def cmd_verify(args) -> int:
    G = _group(args)
    st = args.statement.lower()
    if st == "smooth-structure":
        if not G.is_cyclic or not G.is_abelian:
            raise DomainError("smooth-structure runs over a cyclic group")
        rep = verify.verify_smooth_structure(G.order)
        out = {"statement": st, "group": G.label(), "examined": rep.examined,
               "violations": rep.violations, "equal": rep.ok}
    elif st == "nsum-bound":
        bad = []
        for S, n in verify.random_dgm_draws(args.draws, seed=args.seed):
            r = verify.check_dgm_bound(S, n)
            if not r.holds:
                bad.append(f"{S.group.label()} {S} n={n}: {r.lhs} < {r.rhs}")
        out = {"statement": st, "draws": args.draws, "seed": args.seed, "violations": bad, "equal": not bad}
    else:
        out = verify.verify_characterization(G, st, jobs=args.jobs).to_json()
    _emit(args, out, json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK if out["equal"] else EXIT_FAILED


def cmd_lengths(args) -> int:
    G = _group(args)
    S = _seq(args, G)
    L = arithmetic.length_set(S)
    _emit(args, {"sequence": str(S), "lengths": sorted(L.lengths)}, str(L))
    return EXIT_OK


def cmd_unions(args) -> int:
    G = _group(args)
    res = arithmetic.unions_bounded(G, args.k, args.max_len, jobs=args.jobs)
    text = f"{_brace(map(str, sorted(res.lengths)))}  (|B| <= {res.max_len}, {res.sequences} sequences)"
    _emit(args, res.to_json(), text)
    return EXIT_OK


_TABLE_FIELDS = ["k", "lambda_lower", "lambda_exact", "rho_lower", "rho_exact", "rho_upper", "witness"]


def _ks(args) -> list[int]:
    if args.k is not None:
        return [args.k]
    return list(range(1, args.k_max + 1))


def _rho_lambda(args, which: str) -> int:
    G = _group(args)
    rows = []
    for k in _ks(args):
        r = arithmetic.rho(G, k)
        lam = arithmetic.lambda_(G, k)
        w = r.witness if which == "rho" else lam.witness
        rows.append({
            "k": k,
            "lambda_lower": lam.lower,
            "lambda_exact": "" if lam.exact is None else lam.exact,
            "rho_lower": r.lower,
            "rho_exact": "" if r.exact is None else r.exact,
            "rho_upper": r.upper,
            "witness": "" if w is None else str(w),
            "_json": (r.to_json(), lam.to_json()),
        })
    if args.format == "json":
        for row in rows:
            rj, lj = row["_json"]
            print(json.dumps({"k": row["k"], "rho": rj, "lambda": lj}, sort_keys=True))
        return EXIT_OK
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=_TABLE_FIELDS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
        return EXIT_OK
    for row in rows:
        lam = row["lambda_exact"] if row["lambda_exact"] != "" else f"[{row['lambda_lower']}, ?]"
        rho_ = row["rho_exact"] if row["rho_exact"] != "" else f"[{row['rho_lower']}, {row['rho_upper']}]"
        print(f"k={row['k']}: {which}={rho_ if which == 'rho' else lam}")
        if row["witness"]:
            print(f"  witness: {row['witness']}")
    return EXIT_OK


def cmd_rho(args) -> int:
    return _rho_lambda(args, "rho")


def cmd_lambda(args) -> int:
    return _rho_lambda(args, "lambda")


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", "-g", required=True,
                        help="group spec (dihedral:3, dicyclic:2, cyclic:5, abelian:2x2), JSON, or @file")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--budget", type=int, help="sub-multiset budget (overrides ZSF_BUDGET)")
    common.add_argument("--jobs", "-j", type=int, default=1, help="worker processes")

    seq = argparse.ArgumentParser(add_help=False)
    seq.add_argument("--seq", "-s", required=True, help="sequence text (a^[4] t^[2]), JSON, or @file")

    p = argparse.ArgumentParser(prog="zsf", description="Product-one sequences over small finite groups.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("group", parents=[common], help="describe a group")
    sp.set_defaults(func=cmd_group)

    sp = sub.add_parser("pi", parents=[common, seq], help="product sets")
    sp.add_argument("--subsequences", action="store_true", help="products of all non-empty subsequences")
    sp.add_argument("--length", type=int, help="restrict subsequences to this length")
    sp.add_argument("--sums", action="store_true", help="subsequence sums (abelian groups)")
    sp.set_defaults(func=cmd_pi)

    sp = sub.add_parser("classify", parents=[common, seq], help="product-one, free, squarefree, smooth")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("atom", parents=[common, seq], help="minimality test with split witness")
    sp.set_defaults(func=cmd_atom)

    sp = sub.add_parser("davenport", parents=[common], help="large or small Davenport constant")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--large", action="store_true", default=True)
    mode.add_argument("--small", action="store_true")
    sp.add_argument("--strategy", choices=("descending", "ascending"), default="descending")
    sp.set_defaults(func=cmd_davenport)

    sp = sub.add_parser("census", parents=[common], help="atoms of one length")
    sp.add_argument("--length", type=int, help="default: D(G)")
    sp.add_argument("--reflections", action="store_true", help="only terms outside the rotation subgroup")
    sp.add_argument("--expand-orbits", action="store_true")
    sp.add_argument("--timings", action="store_true", help="include per-atom verdict times")
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("verify", parents=[common], help="check a characterization against a census")
    sp.add_argument("--statement", required=True,
                    help="thm4.1 thm4.2 thm4.3 prop3.2 prop3.3 smooth-structure nsum-bound")
    sp.add_argument("--draws", type=int, default=10_000, help="nsum-bound fuzz draws")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("lengths", parents=[common, seq], help="set of factorization lengths")
    sp.set_defaults(func=cmd_lengths)

    sp = sub.add_parser("unions", parents=[common], help="bounded union of sets of lengths containing k")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--max-len", type=int, required=True)
    sp.set_defaults(func=cmd_unions)

    for name, func in (("rho", cmd_rho), ("lambda", cmd_lambda)):
        sp = sub.add_parser(name, parents=[common], help=f"{name}_k table")
        ks = sp.add_mutually_exclusive_group(required=True)
        ks.add_argument("--k", type=int)
        ks.add_argument("--k-max", type=int)
        sp.set_defaults(func=func)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget is not None:
        if args.budget < 1:
            parser.error("--budget must be positive")
        os.environ["ZSF_BUDGET"] = str(args.budget)
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        return args.func(args)
    except (ValidationError, DomainError) as exc:
        print(f"zsf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"zsf: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
