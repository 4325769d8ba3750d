"""``relaxec`` command line.

Exit codes: 0 equivalent, 1 inequivalent, 2 unknown, 3 error.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
from contextlib import contextmanager
from typing import List, Optional

from .netlist import NetlistError, emit_blif, parse_blif

EXIT_EQ, EXIT_NEQ, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3


class _Timeout(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which would collide with "unknown"
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("RELAXEC_SEED", "0"))


@contextmanager
def _deadline(ms: Optional[int]):
    if not ms:
        yield
        return

    def fire(*_):
        raise _Timeout(f"timeout after {ms} ms")

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, ms / 1000.0)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _load(path: str):
    with open(path) as fh:
        return parse_blif(fh.read())


def _write(path: Optional[str], text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt_clauses(H) -> str:
    return "\n".join(" ".join(str(l) for l in c) + " 0" for c in H.clauses)


# ------------------------------------------------------------- subcommands
def cmd_check(args) -> int:
    from .eclor import Verdict, ec_lor, ec_lor_star
    n1, n2 = _load(args.a), _load(args.b)
    if args.mode == "star":
        v = ec_lor_star(n1, n2, max_iters=args.pqe_steps)
    else:
        v = ec_lor(n1, n2, max_iters=args.pqe_steps)
    print(v.status.value)
    if v.witness:
        print("witness: " + json.dumps(v.witness, sort_keys=True))
    if v.note:
        print(v.note)
    if args.json:
        _write(args.json, v.to_json(timings=args.timings) + "\n")
    return {Verdict.EQUIVALENT: EXIT_EQ, Verdict.CONSTANT_DEGENERATE: EXIT_EQ,
            Verdict.INEQUIVALENT: EXIT_NEQ}.get(v.status, EXIT_UNKNOWN)


def _chain_H(args):
    from .cnf import prepare_pair
    from .eclor import build_boundary_chain
    n1, n2 = _load(args.a), _load(args.b)
    ctx = prepare_pair(n1, n2)
    if not 0 <= args.cut <= ctx.k:
        raise ValueError(f"cut must be in 0..{ctx.k}")
    mode = "approximate" if args.mode == "star" else "exact"
    chain = build_boundary_chain(n1, n2, mode, relatives=mode == "approximate",
                                 max_iters=args.pqe_steps, ctx=ctx, upto=args.cut)
    return n1, n2, ctx, chain.H[args.cut]


def cmd_boundary(args) -> int:
    from .eclor import certify_boundary
    n1, n2, ctx, H = _chain_H(args)
    print(f"c cut {args.cut}: {len(H.clauses)} clauses over {len(ctx.cut_vars(args.cut))} cut vars")
    rev = {v: k for k, v in {**ctx.m.f1.names, **ctx.m.f2.names}.items()}
    for v in ctx.cut_vars(args.cut):
        print(f"c var {v} {rev.get(v, '?')}")
    print(_fmt_clauses(H))
    cert = certify_boundary(H, args.cut, n1, n2, ctx=ctx)
    print(f"certificate: {cert.method if cert else 'none'}")
    return EXIT_EQ


def cmd_image(args) -> int:
    from .cnf import prepare_pair
    from .qe import cut_image
    n1, n2 = _load(args.a), _load(args.b)
    ctx = prepare_pair(n1, n2)
    R = cut_image(n1, n2, args.cut, ctx=ctx, max_iters=args.pqe_steps)
    print(f"c cut {args.cut}: {len(R.clauses)} clauses")
    print(_fmt_clauses(R))
    return EXIT_EQ


def cmd_beta(args) -> int:
    from .eclor import certify_boundary, prove_inequivalence_via_beta
    n1, n2, ctx, H = _chain_H(args)
    cert = certify_boundary(H, args.cut, n1, n2, ctx=ctx)
    if not cert:
        print(f"no boundary certificate for cut {args.cut}", file=sys.stderr)
        return EXIT_UNKNOWN
    w = prove_inequivalence_via_beta(n1, n2, H, args.cut, cert, ctx=ctx, seed=_seed(args))
    if w is None:
        print("Equivalent")
        return EXIT_EQ
    print("Inequivalent")
    print("witness: " + json.dumps(w, sort_keys=True))
    return EXIT_NEQ


def cmd_gen(args) -> int:
    from .bench import gen_hgated_pair, gen_mlp, inject_bug
    if args.family == "mlp":
        _write(args.o, emit_blif(gen_mlp(args.k, bit=args.bit)))
    elif args.family == "hpair":
        n1, n2, _ = gen_hgated_pair(args.k)
        base = args.o or f"hpair{args.k}"
        if base == "-":
            raise ValueError("hpair writes two files; give -o PREFIX")
        _write(base + "_1.blif", emit_blif(n1))
        _write(base + "_2.blif", emit_blif(n2))
    else:
        src = _load(args.src) if args.src else gen_mlp(args.k)
        _write(args.o, emit_blif(inject_bug(src, args.min_level, _seed(args))))
    return EXIT_EQ


def cmd_exp(args) -> int:
    from .bench import run_experiment
    params = {}
    if args.ks:
        params["ks"] = tuple(int(k) for k in args.ks.split(","))
    if args.name == "table3":
        params.update(seeds=args.seeds, conflict_limit=args.sat_conflicts)
        if args.k:
            params["k"] = args.k
    else:
        params["max_iters"] = args.pqe_steps
    if args.blif_dir:
        params["out_dir"] = args.blif_dir
    rep = run_experiment(args.name, **params)
    _write(args.csv, rep.to_csv())
    if args.json:
        _write(args.json, rep.to_json() + "\n")
    return EXIT_EQ


def cmd_dimacs(args) -> int:
    from .cnf import emit_dimacs
    if args.formula == "alpha":
        from .cnf import prepare_pair
        ctx = prepare_pair(_load(args.a), _load(args.b))
        f = ctx.m.alpha
    else:
        n1, n2, ctx, H = _chain_H(args)
        f = ctx.m.beta(H)
    _write(args.o, emit_dimacs(f))
    return EXIT_EQ


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pqe-steps", type=int, default=200000,
                        help="iteration budget for each PQE/QE call")
    common.add_argument("--sat-conflicts", type=int, default=200000,
                        help="conflict budget for plain SAT calls")
    common.add_argument("--timeout-ms", type=int, default=0, help="wall-clock limit (0 = none)")
    common.add_argument("--seed", type=int, default=None, help="overrides RELAXEC_SEED")

    p = _Parser(prog="relaxec", description="Equivalence checking by logic relaxation.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def pair(name, fn, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("a")
        s.add_argument("b")
        s.set_defaults(fn=fn)
        return s

    s = pair("check", cmd_check, "decide equivalence of two BLIF netlists")
    s.add_argument("--mode", choices=("exact", "star"), default="exact")
    s.add_argument("--json", metavar="OUT", help="write the JSON report ('-' for stdout)")
    s.add_argument("--timings", action="store_true", help="include timings in JSON")

    for name, fn, h in (("boundary", cmd_boundary, "print H_i and its certificate status"),
                        ("beta", cmd_beta, "solve H_i & G_rlx & neq")):
        s = pair(name, fn, h)
        s.add_argument("--cut", type=int, required=True)
        s.add_argument("--mode", choices=("exact", "star"), default="exact")

    s = pair("image", cmd_image, "cut image by quantifier elimination")
    s.add_argument("--cut", type=int, required=True)

    s = pair("dimacs", cmd_dimacs, "export alpha or beta as DIMACS")
    s.add_argument("--formula", choices=("alpha", "beta"), required=True)
    s.add_argument("--cut", type=int, default=None)
    s.add_argument("--mode", choices=("exact", "star"), default="exact")
    s.add_argument("-o", default=None)

    s = sub.add_parser("gen", parents=[common], help="emit benchmark circuits")
    s.add_argument("family", choices=("mlp", "hpair", "bug"))
    s.add_argument("--k", type=int, default=4)
    s.add_argument("--bit", type=int, default=None, help="mlp output bit (default k-1)")
    s.add_argument("--src", default=None, help="bug: BLIF to mutate (default mlp k)")
    s.add_argument("--min-level", type=int, default=1)
    s.add_argument("-o", default=None)
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("exp", parents=[common], help="run a desk-scale experiment")
    s.add_argument("name", choices=("table1", "table2", "table3"))
    s.add_argument("--ks", default=None, help="comma separated k values (table1/2)")
    s.add_argument("--k", type=int, default=None, help="table3 multiplier size")
    s.add_argument("--seeds", type=int, default=20)
    s.add_argument("--jobs", type=int, default=1, help="accepted; rows run serially")
    s.add_argument("--csv", default=None)
    s.add_argument("--json", default=None)
    s.add_argument("--blif-dir", default=None)
    s.set_defaults(fn=cmd_exp)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    p = build_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code not in (0, None) else 0
    if args.cmd == "dimacs" and args.formula == "beta" and args.cut is None:
        print("relaxec: dimacs --formula beta needs --cut", file=sys.stderr)
        return EXIT_ERROR
    try:
        with _deadline(args.timeout_ms):
            return args.fn(args)
    except _Timeout as e:
        print(f"Unknown\n{e}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (OSError, NetlistError, ValueError) as e:
        print(f"relaxec: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
