"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (not the identity, rejected, not in
C, a failed check), 2 errors.  File arguments that do not exist are looked up
in the corpus (``graphs/`` or ``machines/``).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import corpus, report
from .automata import (ACCEPTED, accepts_bounded, accepts_lambda_free, enumerate_language, load_automaton,
                       serialize_automaton)
from .graph_core import format_word, parse_word
from .lambda_elim import ClassificationError, classify, decompose, eliminate_lambda
from .lower_bounds import bin_value, l1_member, lower_bound_report
from .semilinear import format_linear, multisets_up_to, parikh, parikh_of_nfa, sl_member
from .traces import is_identity, normal_form

DEFAULT_BUDGET = 32


def _resolve(path: str, kind: str, root) -> str:
    if os.path.exists(path):
        return path
    try:
        base = corpus.corpus_dir(root) / kind
    except FileNotFoundError:
        raise FileNotFoundError(f"{path}: no such file") from None
    ext = ".graph" if kind == "graphs" else ".auto"
    for cand in (base / path, base / Path(path).name, base / (Path(path).name + ext)):
        if cand.exists():
            return str(cand)
    raise FileNotFoundError(f"{path}: no such file (also looked in {base})")


def _graph(args):
    path = _resolve(args.graph, "graphs", args.corpus)
    try:
        return corpus.load_graph(path)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _auto(path: str, args, graph=None):
    path = _resolve(path, "machines", args.corpus)
    try:
        return load_automaton(path, graph), path
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _show_word(w: str) -> str:
    return w if w else "@"


def cmd_reduce(args) -> int:
    g = _graph(args)
    w = parse_word(args.word, g)
    print(format_word(normal_form(g, w)))
    ident = is_identity(g, w)
    print("IDENTITY" if ident else "NOT-IDENTITY")
    return 0 if ident else 1


def cmd_member(args) -> int:
    A, _ = _auto(args.auto, args)
    word = "" if args.word == "@" else args.word
    if A.lambda_free and args.budget is None:
        ok = accepts_lambda_free(A, word)
        print("accepted" if ok else "rejected")
        return 0 if ok else 1
    verdict = accepts_bounded(A, word, DEFAULT_BUDGET if args.budget is None else args.budget)
    print(verdict)
    return 0 if verdict == ACCEPTED else 1


def cmd_enum(args) -> int:
    A, _ = _auto(args.auto, args)
    budget = DEFAULT_BUDGET if args.budget is None else args.budget
    for w in sorted(enumerate_language(A, args.maxlen, budget), key=lambda w: (len(w), w)):
        print(_show_word(w))
    return 0


def cmd_classify(args) -> int:
    res = classify(_graph(args))
    print("\n".join(res.lines()))
    return 0 if res.in_C else 1


def cmd_decompose(args) -> int:
    g = _graph(args)
    try:
        plan = decompose(g)
    except ClassificationError as exc:
        print(f"not in C: {exc}")
        return 1
    print(plan)
    return 0


def cmd_eliminate(args) -> int:
    g = _graph(args) if args.graph else None
    A, apath = _auto(args.auto, args, g)
    try:
        B = eliminate_lambda(A.graph, A)
    except ClassificationError as exc:
        print(f"not in C: {exc}")
        return 1
    print(f"lambda-free automaton: {len(B.states)} states, {len(B.edges)} edges")
    if args.out:
        gpath = _resolve(args.graph, "graphs", args.corpus) if args.graph else \
            os.path.join(os.path.dirname(apath), A.graph_path) if A.graph_path else None
        rel = os.path.relpath(gpath, os.path.dirname(os.path.abspath(args.out))) if gpath else None
        Path(args.out).write_text(serialize_automaton(B, rel))
        print(f"written to {args.out}")
    if args.verify_maxlen is not None:
        budget = DEFAULT_BUDGET if args.budget is None else args.budget
        same = enumerate_language(B, args.verify_maxlen) == enumerate_language(A, args.verify_maxlen, budget)
        print(f"bounded check up to length {args.verify_maxlen}: {'EQUAL' if same else 'DIFFERENT'}")
        return 0 if same else 1
    return 0


def cmd_parikh(args) -> int:
    A, _ = _auto(args.nfa, args)
    S = parikh_of_nfa(A)
    for part in S.parts:
        print(format_linear(part))
    if not S.parts:
        print("empty")
    # every vector of total ≤ maxlen: in S iff some accepted word has that Parikh vector
    words = enumerate_language(A, args.maxlen, DEFAULT_BUDGET)
    seen = {parikh(w, A.input_alphabet).counts for w in words}
    agree = all((v in seen) == sl_member(S, v) for v in multisets_up_to(len(A.input_alphabet), args.maxlen))
    print(f"cross-check up to length {args.maxlen}: {'AGREE' if agree else 'DISAGREE'}")
    return 0 if agree else 1


def cmd_lowerbound(args) -> int:
    rep = lower_bound_report(args.k, args.m, args.r, args.s)
    print(report.render_fooling_report(rep))
    print(f"witness n={rep.n}")
    if args.figure:
        report.lower_bound_figure(rep, args.figure)
        print(f"figure written to {args.figure}")
    return 0


def cmd_l1(args) -> int:
    w = "" if args.word == "@" else args.word
    ok = l1_member(w)
    u = w.rstrip("c")
    extra = f" (bin={bin_value(u)}, c-count={len(w) - len(u)})" if set(u) <= {"0", "1"} else ""
    print(("member" if ok else "not a member") + extra)
    return 0 if ok else 1


def cmd_selftest(args) -> int:
    from .acceptance import CHECKS

    ok = True
    for check in CHECKS:
        res = check(args.quick, args.corpus)
        print(res.line(), flush=True)
        ok = ok and res.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="valence", description="Graph monoids as storage for valence automata.")
    p.add_argument("--corpus", help="corpus directory (default: the shipped corpus)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("reduce", help="normal form of a monoid word")
    s.add_argument("--graph", required=True)
    s.add_argument("--word", required=True, help='tokens like "+v -v"; @ is the empty word')
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("member", help="membership of an input word")
    s.add_argument("--auto", required=True)
    s.add_argument("--word", required=True)
    s.add_argument("--budget", type=int, help="lambda edges allowed per run")
    s.set_defaults(func=cmd_member)

    s = sub.add_parser("enum", help="accepted words up to a length")
    s.add_argument("--auto", required=True)
    s.add_argument("--maxlen", type=int, required=True)
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_enum)

    s = sub.add_parser("classify", help="hypothesis, forbidden path and membership in C")
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("decompose", help="the xZ / *B plan of a graph in C")
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("eliminate", help="remove lambda transitions")
    s.add_argument("--graph")
    s.add_argument("--auto", required=True)
    s.add_argument("--out")
    s.add_argument("--verify-maxlen", type=int)
    s.add_argument("--budget", type=int, help="lambda budget for enumerating the input")
    s.set_defaults(func=cmd_eliminate)

    s = sub.add_parser("parikh", help="Parikh image of a finite automaton")
    s.add_argument("--nfa", required=True)
    s.add_argument("--maxlen", type=int, required=True)
    s.set_defaults(func=cmd_parikh)

    s = sub.add_parser("lowerbound", help="fooling-set lower bound report")
    for flag in ("--k", "--m", "--r", "--s"):
        s.add_argument(flag, type=int, required=True)
    s.add_argument("--figure", help="write a PNG plot of both sides of the bound")
    s.set_defaults(func=cmd_lowerbound)

    s = sub.add_parser("l1", help="membership in L1")
    s.add_argument("--word", required=True)
    s.set_defaults(func=cmd_l1)

    s = sub.add_parser("selftest", help="run the acceptance checks")
    s.add_argument("--quick", action="store_true")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
