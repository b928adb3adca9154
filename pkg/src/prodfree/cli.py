"""prodfree command line.

Exit codes: 0 ok, 1 counterexample or failed reproduction, 2 usage error,
3 resource limit.

    prodfree sigma --first-n 10000000 --jmax 13 --format csv
    prodfree example --variant N
    prodfree brute --n 12
    prodfree verify --modulus 9 --set 2,5,6,8
    prodfree construct qnr --p 3 --a 2
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import construct, primes, series, verify
from .approx import ApproxValue
from .arith import FactorShape, OmegaWindow, resolve_window
from .errors import (CertificateError, DomainError, PreconditionError, ProdFreeError,
                     ResourceError)

EXIT_OK, EXIT_FOUND, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise UsageError(f"not a comma-separated integer list: {text!r}") from exc


def _read_set(args) -> list[int]:
    if args.set is not None:
        return _parse_ints(args.set)
    with open(args.set_file) as fh:
        return [int(line) for line in fh if line.strip()]


def _prime_table(args) -> primes.PrimeTable:
    budget = args.budget_mb * 2**20
    if args.first_n is not None and args.upto is not None:
        raise UsageError("give exactly one of --first-n / --upto")
    if args.first_n is None and args.upto is None:
        raise UsageError("one of --first-n / --upto is required")
    if args.first_n is not None:
        if args.first_n < 0:
            raise UsageError("--first-n must be >= 0")
        if args.first_n < 100_000 or args.no_cache:
            return primes.first_n_primes(args.first_n, budget)
        return primes.cached_first_n(args.first_n, args.cache_dir, budget)
    if args.upto < 0:
        raise UsageError("--upto must be >= 0")
    if args.upto < 10**6 or args.no_cache:
        return primes.sieve_upto(args.upto, budget)
    return primes.cached_upto(args.upto, args.cache_dir, budget)


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "sigma_j", "S_j"])
    for j, s, S in rows:
        w.writerow([j, _cell(s), _cell(S)])
    return buf.getvalue()


def render_table(rows) -> str:
    lines = [f"{'j':>3}  {'sigma_j':>12}    {'j':>3}  {'S_j':>12}"]
    for j, s, S in rows:
        lines.append(f"{j:>3}  {float(s):>12.6f}    {j:>3}  {float(S):>12.6f}")
    return "\n".join(lines) + "\n"


def cmd_sigma(args) -> int:
    if args.jmax < 1:
        raise UsageError("--jmax must be >= 1")
    table = _prime_table(args)
    mode = "exact" if args.exact else "float"
    sig = series.power_sums(table, args.jmax, mode)
    comp = series.complete_homogeneous(sig)
    rows = series.table_rows(sig, comp)
    if args.format == "json":
        _emit({"sigma": sig.to_json(), "complete": comp.to_json()})
    elif args.format == "csv":
        sys.stdout.write(render_csv(rows))
    else:
        sys.stdout.write(render_table(rows))
    return EXIT_OK


def cmd_example(args) -> int:
    if args.upto is None and args.first_n is None:
        args.first_n = construct.REFERENCE_PRIME_COUNT
    table = _prime_table(args)
    variant = "Nprime" if args.variant in ("Nprime", "N'") else args.variant
    rep = construct.worked_example(table, variant)
    if args.format == "json":
        _emit(rep.to_json())
    else:
        rows = series.table_rows(rep.sigma_table, rep.s_table)
        sys.stdout.write(render_table(rows))
        print(f"phi(N)/N        {rep.phi_ratio}")
        print(f"window sum      {rep.window_sum}")
        print(f"density bound   {rep.density_bound}")
        print(f"certified lower {rep.certified_lower:.7f}  (target: > {rep.target_bound})")
        print(f"log10 of modulus {rep.digits_estimate:.4e}")
        if not rep.reproduction:
            print("note: prime set differs from the first 10,000,000 primes; not a reproduction")
    if rep.reproduction and not rep.passes:
        return EXIT_FOUND
    return EXIT_OK


def cmd_brute(args) -> int:
    res = verify.max_product_free(args.n, args.limit)
    _emit(res.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    elems = _read_set(args)
    if args.k < args.j:
        raise UsageError("--k must be >= --j")
    if args.modulus is not None:
        if args.modulus < 1:
            raise UsageError("--modulus must be >= 1")
        S = construct.ResidueSet.from_elements(args.modulus, elems)
    else:
        S = elems
    if (args.k, args.j) == (2, 1) and args.semantics == "plain":
        cex = (verify.is_product_free_residues(S) if args.modulus is not None
               else verify.is_product_free_integers(S))
    else:
        cex = verify.is_kj_product_free(S, args.k, args.j, args.modulus, args.semantics,
                                        args.budget)
    if cex is None:
        _emit({"product_free": True, "k": args.k, "j": args.j, "modulus": args.modulus})
        return EXIT_OK
    _emit({"product_free": False, "k": args.k, "j": args.j, "counterexample": cex.to_json()})
    return EXIT_FOUND


def _density_json(d):
    if isinstance(d, ApproxValue):
        return d.to_json()
    return {"num": str(d.numerator), "den": str(d.denominator), "value": float(d)}


def cmd_construct(args) -> int:
    sub = args.construct_cmd
    if sub == "qnr":
        _emit(construct.qnr_set(args.p, args.a).to_json())
    elif sub == "lift":
        divs = _parse_ints(args.divisors)
        S = construct.lift_to_residues(divs, args.n)
        out = S.to_json()
        out["lemma_cardinality"] = str(construct.lemma_cardinality(divs, args.n))
        if not args.full:
            out.pop("elements")
        _emit(out)
    elif sub == "window":
        shape = (FactorShape.from_json(json.loads(args.shape)) if args.shape
                 else FactorShape.from_int(args.n))
        w = OmegaWindow.from_spec(args.window)
        try:
            D = construct.divisor_window_set(shape, w)
        except CertificateError as exc:
            _emit({"valid": False, "reason": str(exc), "pair": list(exc.witness)})
            return EXIT_FOUND
        out = {"valid": True, "shape": shape.to_json(), "window": w.to_json(),
               "certificate": D.certificate}
        density = construct.density_of_window_set(shape, w, mode="exact" if args.exact else None)
        out["density"] = _density_json(density)
        _emit(out)
    elif sub == "resolve":
        w = resolve_window(args.lo, args.hi, strict=not args.inclusive)
        _emit({"window": w.to_json(), "strict": not args.inclusive})
    elif sub == "main":
        mode = "exact" if args.exact else ("float" if args.float else None)
        _emit(construct.theorem_main_instance(args.x, mode=mode).to_json())
    elif sub == "general":
        mode = "exact" if args.exact else ("float" if args.float else None)
        _emit(construct.theorem_general_instance(args.x, args.m, mode=mode).to_json())
    elif sub == "delta":
        _emit(construct.delta_lower_bound(args.u, args.C).to_json())
    return EXIT_OK


def _prime_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--first-n", type=int, dest="first_n")
    p.add_argument("--upto", type=int)
    p.add_argument("--cache-dir", default=None, help="prime cache directory "
                   f"(default ${primes.CACHE_ENV} or ~/.cache/prodfree)")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--budget-mb", type=int, default=primes.DEFAULT_BUDGET // 2**20)
    p.add_argument("--threads", type=int, default=None,
                   help="accepted for compatibility; computation is single-threaded")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prodfree", description="Product-free sets of residues")
    subs = ap.add_subparsers(dest="cmd", required=True)

    p = subs.add_parser("sigma", help="prime reciprocal power sums and complete sums")
    _prime_flags(p)
    p.add_argument("--jmax", type=int, default=13)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p.set_defaults(func=cmd_sigma)

    p = subs.add_parser("example", help="density bound for N = Q^14 or N'")
    _prime_flags(p)
    p.add_argument("--variant", choices=("N", "Nprime", "N'"), default="N")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_example)

    p = subs.add_parser("brute", help="exact D(n) by branch and bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--limit", type=int, default=verify.SEARCH_LIMIT)
    p.set_defaults(func=cmd_brute)

    p = subs.add_parser("verify", help="check (k,j)-product-freeness")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--set")
    g.add_argument("--set-file")
    p.add_argument("--modulus", type=int)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--semantics", choices=("plain", "multiset"), default="plain")
    p.add_argument("--budget", type=int, default=verify.KJ_BUDGET)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("construct", help="build product-free objects")
    p.set_defaults(func=cmd_construct)
    cs = p.add_subparsers(dest="construct_cmd", required=True)
    q = cs.add_parser("qnr")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--a", type=int, required=True)
    q = cs.add_parser("lift")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--divisors", required=True)
    q.add_argument("--full", action="store_true", help="list every element")
    q = cs.add_parser("window")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--shape", help="JSON [[prime, exponent], ...]")
    q.add_argument("--window", required=True, help="e.g. 3-5,11-13")
    q.add_argument("--exact", action="store_true")
    q = cs.add_parser("resolve", help="integer window between real bounds")
    q.add_argument("--lo", type=float, required=True)
    q.add_argument("--hi", type=float, required=True)
    q.add_argument("--inclusive", action="store_true")
    for name in ("main", "general"):
        q = cs.add_parser(name)
        q.add_argument("--x", type=int, required=True)
        if name == "general":
            q.add_argument("--m", type=int, required=True)
        mg = q.add_mutually_exclusive_group()
        mg.add_argument("--exact", action="store_true")
        mg.add_argument("--float", action="store_true")
    q = cs.add_parser("delta")
    q.add_argument("--u", type=float, required=True)
    q.add_argument("--C", type=float, default=1.0)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except CertificateError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_FOUND
    except PreconditionError as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return EXIT_FOUND
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProdFreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FOUND


if __name__ == "__main__":
    sys.exit(main())
