"""Generators for the rewriting systems presenting n-quasigroups and
n-loops, for any n >= 1.

The base quasigroup system pairs the n-ary operation f with its n division
operations g_1..g_n (2n rules); loops add an identity constant e and its
absorption rules.  The "complete" variants add the derived rules that make
the system confluent.  Rule labels encode the identity family and the slot
indices, e.g. ``2.7[i=1,j=3]``, and are stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rewriting import Rule, Trs
from .terms import App, Signature, Term, Var


@dataclass(frozen=True)
class VarietySpec:
    kind: str  # quasigroup | loop
    n: int
    complete: bool = False

    def __post_init__(self):
        if self.kind not in ("quasigroup", "loop"):
            raise ValueError("kind must be 'quasigroup' or 'loop', got %r" % (self.kind,))
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n must be a positive integer, got %r" % (self.n,))


def var_run(lo: int, hi: int) -> tuple:
    """The sequence x_lo, ..., x_hi; empty when lo > hi."""
    return tuple(Var("x%d" % k) for k in range(lo, hi + 1))


def const_run(symbol: str, count: int) -> tuple:
    """`count` copies of a constant; empty when count is 0."""
    if count < 0:
        raise ValueError("negative repeat count %d" % count)
    return (App(symbol),) * count


def variety_signature(kind: str, n: int) -> Signature:
    symbols = {"f": n}
    for i in range(1, n + 1):
        symbols["g%d" % i] = n
    if kind == "loop":
        symbols["e"] = 0
    return Signature(symbols)


def _f(args) -> Term:
    return App("f", tuple(args))


def _g(i: int, args) -> Term:
    return App("g%d" % i, tuple(args))


def generate_trs(spec: VarietySpec) -> Trs:
    """The presentation of the chosen variety as a rewriting system."""
    n = spec.n
    x = Var("x")
    e = "e"
    rules = []

    if spec.kind == "loop":
        for i in range(1, n + 1):
            lhs = _f(const_run(e, i - 1) + (x,) + const_run(e, n - i))
            rules.append(Rule(lhs, x, "2.2[i=%d]" % i))

    for i in range(1, n + 1):
        lhs = _f(var_run(1, i - 1) + (_g(i, var_run(1, n)),) + var_run(i + 1, n))
        rules.append(Rule(lhs, Var("x%d" % i), "2.3[i=%d]" % i))
    for i in range(1, n + 1):
        lhs = _g(i, var_run(1, i - 1) + (_f(var_run(1, n)),) + var_run(i + 1, n))
        rules.append(Rule(lhs, Var("x%d" % i), "2.4[i=%d]" % i))

    if spec.complete:
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                lhs = _g(
                    i,
                    var_run(1, i - 1)
                    + (Var("x%d" % j),)
                    + var_run(i + 1, j - 1)
                    + (_g(j, var_run(1, n)),)
                    + var_run(j + 1, n),
                )
                rules.append(Rule(lhs, Var("x%d" % i), "2.7[i=%d,j=%d]" % (i, j)))
        for i in range(1, n + 1):
            for j in range(1, i):
                lhs = _g(
                    i,
                    var_run(1, j - 1)
                    + (_g(j, var_run(1, n)),)
                    + var_run(j + 1, i - 1)
                    + (Var("x%d" % j),)
                    + var_run(i + 1, n),
                )
                rules.append(Rule(lhs, Var("x%d" % i), "2.8[i=%d,j=%d]" % (i, j)))
        if spec.kind == "loop":
            for i in range(1, n + 1):
                lhs = _g(i, const_run(e, i - 1) + (x,) + const_run(e, n - i))
                rules.append(Rule(lhs, x, "2.9[i=%d]" % i))
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    lhs = _g(
                        i,
                        const_run(e, i - 1)
                        + (x,)
                        + const_run(e, j - i - 1)
                        + (x,)
                        + const_run(e, n - j),
                    )
                    rules.append(Rule(lhs, App(e), "2.10[i=%d,j=%d]" % (i, j)))
            for i in range(1, n + 1):
                for j in range(1, i):
                    lhs = _g(
                        i,
                        const_run(e, j - 1)
                        + (x,)
                        + const_run(e, i - j - 1)
                        + (x,)
                        + const_run(e, n - i),
                    )
                    rules.append(Rule(lhs, App(e), "2.11[i=%d,j=%d]" % (i, j)))

    return Trs(variety_signature(spec.kind, n), rules)


def base_quasigroup(n: int) -> Trs:
    return generate_trs(VarietySpec("quasigroup", n, complete=False))


def complete_quasigroup(n: int) -> Trs:
    return generate_trs(VarietySpec("quasigroup", n, complete=True))


def base_loop(n: int) -> Trs:
    return generate_trs(VarietySpec("loop", n, complete=False))


def complete_loop(n: int) -> Trs:
    return generate_trs(VarietySpec("loop", n, complete=True))
