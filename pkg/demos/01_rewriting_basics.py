#!/usr/bin/env python3
"""Terms, one-step rewriting, normalization traces and joinability.

Walks the core vocabulary on the binary quasigroup presentation: where
rules apply, how normalization picks redexes, and what the full set of
reducts of a term looks like.
"""

from nquasi import (
    base_quasigroup,
    format_trs,
    joinable,
    normalize,
    parse_term,
    reducts,
    rewrite_steps,
    unify,
)


def banner(title):
    print()
    print("=" * 60)
    print(title)
    print("=" * 60)


def main():
    trs = base_quasigroup(2)
    sig = trs.signature

    banner("THE BASE PRESENTATION (n = 2)")
    print(format_trs(trs).rstrip())

    banner("ONE-STEP REWRITING")
    for text in ["f(g1(x1,x2),x2)", "g1(f(y1,y2),y2)", "x", "g1(x2,x1)"]:
        t = parse_term(text, sig)
        steps = sorted(rewrite_steps(trs, t), key=str)
        print("%-22s ->" % text, end=" ")
        if not steps:
            print("(irreducible)")
        else:
            print("; ".join("%s  via %s at %s" % (u, label, list(pos)) for u, label, pos in steps))

    banner("NORMALIZATION WITH A TRACE")
    t = parse_term("f(x1, g2(x1, f(g1(y1,y2), y2)))", sig)
    print("start:", t)
    for strategy in ("leftmost-innermost", "leftmost-outermost"):
        nf, trace = normalize(trs, t, strategy=strategy)
        print("%-20s -> %s" % (strategy, nf))
        for label, pos in trace:
            print("    %s at %s" % (label, list(pos)))

    banner("REDUCT SETS AND JOINABILITY")
    t = parse_term("f(g1(x1,x2),x2)", sig)
    print("reducts of %s:" % t, sorted(map(str, reducts(trs, t))))
    left = parse_term("y2", sig)
    right = parse_term("f(y1, g2(y1, y2))", sig)
    ok, witness = joinable(trs, left, right)
    print("joinable(%s, %s) -> %s, witness %s" % (left, right, ok, witness))

    banner("UNIFICATION")
    s = parse_term("f(x1,x2)", sig)
    t = parse_term("f(y1, g2(y1,y2))", sig)
    print("mgu(%s, %s) = %s" % (s, t, {k: str(v) for k, v in unify(s, t).items()}))
    clash = unify(parse_term("f(x,x)", sig), parse_term("f(y, g1(y,z))", sig))
    print("f(x,x) against f(y, g1(y,z)):", "no unifier" if clash is None else clash)


if __name__ == "__main__":
    main()
