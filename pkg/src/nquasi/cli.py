"""Command-line front end: one binary, stable text or JSON reports.

Exit codes: 0 the checked property holds (or plain output succeeded),
1 the property fails (a witness is printed), 2 usage or input error,
3 a resource bound was hit.  NQ_REDUCT_CAP overrides the reduct-graph
safety cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from .algebras import AlgebraError, Embedding, algebra_from_json, validate_embedding
from .amalgams import (
    AmalgamError,
    build_amalgam,
    check_strong_amalgamation,
    check_unique_normal_forms,
    normalize_element,
    parse_element_term,
)
from .codescent import check_cep
from .rewriting import (
    CapExceeded,
    DEFAULT_REDUCT_CAP,
    MaxRoundsExceeded,
    StepBoundExceeded,
    TerminationNotVerified,
    UnorientableError,
    check_conditions,
    check_confluence,
    complete,
    critical_pairs,
    format_trs,
    normalize,
    parse_trs,
)
from .terms import ParseError, parse_term
from .varieties import VarietySpec, generate_trs

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def _reduct_cap() -> int:
    raw = os.environ.get("NQ_REDUCT_CAP")
    if raw is None:
        return DEFAULT_REDUCT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise SystemExit("NQ_REDUCT_CAP must be an integer, got %r" % raw)
    if cap < 1:
        raise SystemExit("NQ_REDUCT_CAP must be positive")
    return cap


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _InputError("cannot read %s: %s" % (path, exc)) from None


class _InputError(Exception):
    pass


def _pair_json(cp) -> dict:
    return {
        "left": str(cp.left),
        "right": str(cp.right),
        "peak": str(cp.peak),
        "rule1": cp.rule1,
        "rule2": cp.rule2,
        "position": list(cp.position),
        "trivial": cp.trivial,
    }


def _emit(args, report: dict, human_lines) -> int:
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)
    return report["exit_code"]


def _report(command, inputs, verdict, details, exit_code) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "verdict": verdict,
        "details": details,
        "exit_code": exit_code,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_trs(args) -> int:
    spec = VarietySpec(args.kind, args.n, complete=args.complete)
    sys.stdout.write(format_trs(generate_trs(spec)))
    return EXIT_OK


def cmd_check(args) -> int:
    text = _read(args.trs)
    trs = parse_trs(text)
    cap = _reduct_cap()
    do_confluence = args.confluence or not (args.conditions or args.critical_pairs)
    inputs = {"trs": _digest(text)}
    details = {}
    human = []
    ok = True

    if args.conditions:
        report = check_conditions(trs)
        details["conditions"] = {
            "star": report.star,
            "star2": report.star2,
            "star3": report.star3,
        }
        ok = ok and report.star_ok and report.star3_ok
        human.append("conditions: size-decrease %s, constants %s, subterm-variables %s"
                     % ("ok" if report.star_ok else "FAIL",
                        report.star2,
                        "ok" if report.star3_ok else "FAIL"))
        for label, good in sorted(report.star.items()):
            if not good:
                human.append("  size-decrease fails for rule %s" % label)
        for label, good in sorted(report.star3.items()):
            if not good:
                human.append("  subterm-variables fails for rule %s" % label)

    if args.critical_pairs:
        pairs = critical_pairs(trs)
        details["critical_pairs"] = [_pair_json(cp) for cp in pairs]
        human.append("%d critical pairs (%d trivial)" % (len(pairs), sum(cp.trivial for cp in pairs)))
        for cp in pairs:
            flag = " [trivial]" if cp.trivial else ""
            human.append("  %s%s" % (cp, flag))

    if do_confluence:
        verdict = check_confluence(trs, cap)
        details["confluence"] = {
            "status": verdict.status,
            "witness": _pair_json(verdict.witness) if verdict.witness else None,
            "nonjoinable": [_pair_json(cp) for cp in verdict.nonjoinable],
        }
        if verdict.status == "termination-not-verified":
            print("error: termination not verified (rules do not strictly decrease size)",
                  file=sys.stderr)
            return EXIT_INPUT
        human.append(verdict.status.replace("-", " "))
        if verdict.witness is not None:
            human.append("witness: rules %s x %s at position %s"
                         % (verdict.witness.rule1, verdict.witness.rule2, list(verdict.witness.position)))
            human.append("  peak:  %s" % verdict.witness.peak)
            human.append("  left:  %s" % verdict.witness.left)
            human.append("  right: %s" % verdict.witness.right)
        ok = ok and verdict.confluent

    code = EXIT_OK if ok else EXIT_FAIL
    return _emit(args, _report("check", inputs, "ok" if ok else "fail", details, code), human)


def cmd_normalize(args) -> int:
    text = _read(args.trs)
    trs = parse_trs(text)
    term = parse_term(args.term, trs.signature)
    result, trace = normalize(
        trs, term, strategy=args.strategy, seed=args.seed, max_steps=args.max_steps
    )
    inputs = {"trs": _digest(text), "term": args.term}
    details = {"normal_form": str(result), "steps": [[label, list(pos)] for label, pos in trace]}
    human = ["normal form: %s" % result]
    if args.trace:
        for label, pos in trace:
            human.append("  %s at %s" % (label, list(pos)))
        human.append("  (%d steps)" % len(trace))
    return _emit(args, _report("normalize", inputs, str(result), details, EXIT_OK), human)


def cmd_complete(args) -> int:
    text = _read(args.trs)
    trs = parse_trs(text)
    result = complete(trs, max_rounds=args.max_rounds, cap=_reduct_cap())
    inputs = {"trs": _digest(text)}
    details = {
        "rounds": result.rounds,
        "adopted": [
            {"rule": str(rule), "source_pair": _pair_json(cp)} for rule, cp in result.adopted
        ],
        "trs": format_trs(result.trs),
    }
    human = ["confluent after %d completion round(s), %d rule(s) added"
             % (result.rounds, len(result.adopted))]
    for rule, cp in result.adopted:
        human.append("  adopted %s" % rule)
        human.append("    from pair %s" % cp)
    human.append(format_trs(result.trs).rstrip("\n"))
    return _emit(args, _report("complete", inputs, "confluent", details, EXIT_OK), human)


def cmd_amalgam(args) -> int:
    text = _read(args.diagram)
    try:
        obj = json.loads(text)
        base = algebra_from_json(obj["base"])
        factors = [algebra_from_json(f) for f in obj["factors"]]
        embeddings = obj["embeddings"]
    except (KeyError, ValueError) as exc:
        raise _InputError("bad diagram file: %s" % exc) from None
    inputs = {"diagram": _digest(text)}

    if args.normalize is not None:
        diagram = build_amalgam(base, factors, embeddings)
        term = parse_element_term(diagram, args.normalize)
        element = normalize_element(diagram, term, strategy=args.strategy, seed=args.seed)
        details = {"normal_form": str(element)}
        return _emit(
            args,
            _report("amalgam", inputs, str(element), details, EXIT_OK),
            ["normal form: %s" % element],
        )

    if args.check_unf:
        diagram = build_amalgam(base, factors, embeddings)
        bad = check_unique_normal_forms(
            diagram, depth=args.depth, trials=args.trials, seed=args.seed, cap=_reduct_cap()
        )
        if bad is None:
            report = _report("amalgam", inputs, "unique-normal-forms", {"depth": args.depth}, EXIT_OK)
            return _emit(args, report, ["unique normal forms up to size %d: ok" % args.depth])
        details = {"counterexample": str(bad)}
        report = _report("amalgam", inputs, "counterexample", details, EXIT_FAIL)
        return _emit(args, report, ["counterexample: %s" % bad])

    if len(factors) != 2:
        raise _InputError("strong amalgamation check needs exactly two factors")
    sa = check_strong_amalgamation(base, factors[0], factors[1], embeddings)
    details = {
        "ok": sa.ok,
        "intersection": sorted(sa.intersection),
        "base_image": sorted(sa.base_image),
    }
    code = EXIT_OK if sa.ok else EXIT_FAIL
    return _emit(args, _report("amalgam", inputs, str(sa), details, code), [str(sa)])


def cmd_codescent(args) -> int:
    text = _read(args.embedding)
    try:
        obj = json.loads(text)
        source = _load_algebra_field(obj["source"], args.embedding)
        target = _load_algebra_field(obj["target"], args.embedding)
        mapping = obj["map"]
    except (KeyError, ValueError) as exc:
        raise _InputError("bad embedding file: %s" % exc) from None
    emb = Embedding(source, target, mapping)
    bad = validate_embedding(emb)
    if bad:
        raise _InputError("invalid embedding: %s" % bad)
    scope = "f" if args.scope == "f" else "full"
    report = check_cep(emb, scope=scope)
    inputs = {"embedding": _digest(text)}
    details = {
        "scope": scope,
        "congruences_checked": len(report.witnesses),
        "failing": str(report.failing) if report.failing is not None else None,
    }
    verdict = "effective" if report.verdict else "not-effective"
    human = [str(report)]
    if scope == "full":
        human.insert(0, "effective codescent morphism" if report.verdict
                     else "not an effective codescent morphism")
    code = EXIT_OK if report.verdict else EXIT_FAIL
    return _emit(args, _report("codescent", inputs, verdict, details, code), human)


def _load_algebra_field(value, embedding_path):
    if isinstance(value, str):
        base_dir = os.path.dirname(os.path.abspath(embedding_path))
        return algebra_from_json(_read(os.path.join(base_dir, value)))
    return algebra_from_json(value)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nq",
        description="Rewriting workbench for n-quasigroups and n-loops.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("gen-trs", help="emit a variety presentation as a TRS file")
    gen.add_argument("--kind", choices=["quasigroup", "loop"], required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--complete", action="store_true")
    gen.set_defaults(func=cmd_gen_trs)

    chk = sub.add_parser("check", help="confluence / condition / critical-pair checks")
    chk.add_argument("--trs", required=True)
    chk.add_argument("--confluence", action="store_true")
    chk.add_argument("--conditions", action="store_true")
    chk.add_argument("--critical-pairs", action="store_true")
    chk.add_argument("--json", action="store_true")
    chk.set_defaults(func=cmd_check)

    norm = sub.add_parser("normalize", help="rewrite a term to normal form")
    norm.add_argument("--trs", required=True)
    norm.add_argument("--term", required=True)
    norm.add_argument(
        "--strategy",
        choices=["leftmost-innermost", "leftmost-outermost", "random"],
        default="leftmost-innermost",
    )
    norm.add_argument("--seed", type=int, default=0)
    norm.add_argument("--max-steps", type=int, default=None)
    norm.add_argument("--trace", action="store_true")
    norm.add_argument("--json", action="store_true")
    norm.set_defaults(func=cmd_normalize)

    comp = sub.add_parser("complete", help="orient non-joinable critical pairs until confluent")
    comp.add_argument("--trs", required=True)
    comp.add_argument("--max-rounds", type=int, default=10)
    comp.add_argument("--json", action="store_true")
    comp.set_defaults(func=cmd_complete)

    ama = sub.add_parser("amalgam", help="free products with an amalgamated subalgebra")
    ama.add_argument("--diagram", required=True)
    action = ama.add_mutually_exclusive_group(required=True)
    action.add_argument("--normalize", metavar="TERM", default=None)
    action.add_argument("--check-unf", action="store_true")
    action.add_argument("--check-strong-amalgamation", action="store_true")
    ama.add_argument("--depth", type=int, default=4)
    ama.add_argument("--trials", type=int, default=200)
    ama.add_argument("--seed", type=int, default=0)
    ama.add_argument(
        "--strategy",
        choices=["leftmost-innermost", "leftmost-outermost", "random"],
        default="leftmost-innermost",
    )
    ama.add_argument("--json", action="store_true")
    ama.set_defaults(func=cmd_amalgam)

    cod = sub.add_parser("codescent", help="effective-codescent decision for an embedding")
    cod.add_argument("--embedding", required=True)
    cod.add_argument("--scope", choices=["f", "full"], default="full")
    cod.add_argument("--json", action="store_true")
    cod.set_defaults(func=cmd_codescent)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand == "gen-trs" and args.n < 1:
            parser.error("--n must be at least 1")
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return args.func(args)
    except (_InputError, ParseError, AlgebraError, AmalgamError, TerminationNotVerified) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except UnorientableError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_FAIL
    except (CapExceeded, StepBoundExceeded, MaxRoundsExceeded) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
