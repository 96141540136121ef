"""Rewrite relation, normalization, critical pairs, confluence and
completion for term rewriting systems whose rules strictly shrink terms.

Confluence is decided for terminating systems by joinability of all
critical pairs; termination itself is only ever certified through the
syntactic size-decrease condition (the `star` check below), never guessed.
A brute-force local-confluence oracle over an enumerated universe of small
terms provides an independent cross-check of the critical-pair route.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from random import Random

from .terms import (
    App,
    ParseError,
    Position,
    Signature,
    Substitution,
    Term,
    Var,
    apply_substitution,
    canonical_renaming,
    check_well_formed,
    has_elem,
    match,
    positions,
    positions_postorder,
    rename_apart,
    replace_at,
    size,
    term_key,
    unify,
    variables,
)

DEFAULT_REDUCT_CAP = 100_000

STRATEGIES = ("leftmost-innermost", "leftmost-outermost", "random")


class RewriteError(Exception):
    pass


class TerminationNotVerified(RewriteError):
    """The size-decrease condition failed and no step bound was given."""


class CapExceeded(RewriteError):
    """A reduct-graph search outgrew its safety cap."""


class StepBoundExceeded(RewriteError):
    pass


class UnorientableError(RewriteError):
    def __init__(self, pair, reason):
        super().__init__("unorientable critical pair (%s): %s vs %s" % (reason, pair.left, pair.right))
        self.pair = pair
        self.reason = reason


class MaxRoundsExceeded(RewriteError):
    def __init__(self, rounds, trs):
        super().__init__("completion did not converge within %d rounds" % rounds)
        self.rounds = rounds
        self.trs = trs


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    label: str

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise ValueError("rule %s: left-hand side is a variable" % self.label)
        if has_elem(self.lhs) or has_elem(self.rhs):
            raise ValueError("rule %s: element leaves are not allowed" % self.label)
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            raise ValueError(
                "rule %s: right-hand side has fresh variables %s" % (self.label, sorted(extra))
            )

    def __str__(self) -> str:
        return "%s: %s -> %s" % (self.label, self.lhs, self.rhs)


class Trs:
    """A signature together with a finite sequence of rewrite rules."""

    def __init__(self, signature: Signature, rules):
        rules = tuple(rules)
        labels = [r.label for r in rules]
        if len(set(labels)) != len(labels):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise ValueError("duplicate rule labels: %s" % dupes)
        for r in rules:
            check_well_formed(signature, r.lhs)
            check_well_formed(signature, r.rhs)
        self.signature = signature
        self.rules = rules
        self._by_root = {}
        for r in rules:
            self._by_root.setdefault(r.lhs.symbol, []).append(r)

    def rules_for_root(self, symbol: str):
        return self._by_root.get(symbol, ())

    def rule(self, label: str) -> Rule:
        for r in self.rules:
            if r.label == label:
                return r
        raise KeyError(label)

    def with_rules(self, extra) -> "Trs":
        return Trs(self.signature, self.rules + tuple(extra))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Trs)
            and self.signature == other.signature
            and self.rules == other.rules
        )

    def __repr__(self) -> str:
        return "Trs(%r, %d rules)" % (self.signature, len(self.rules))


def format_trs(trs: Trs) -> str:
    lines = ["sig " + " ".join("%s/%d" % (s, k) for s, k in trs.signature.symbols.items())]
    for r in trs.rules:
        lines.append("rule %s: %s -> %s" % (r.label, r.lhs, r.rhs))
    return "\n".join(lines) + "\n"


def parse_trs(text: str) -> Trs:
    """Parse the TRS file format: one `sig NAME/ARITY ...` line followed by
    `rule LABEL: LHS -> RHS` lines; `#` comments; LF or CRLF."""
    sig = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("sig "):
            if sig is not None:
                raise ParseError("line %d: duplicate sig line" % lineno)
            symbols = {}
            for chunk in line[4:].split():
                if "/" not in chunk:
                    raise ParseError("line %d: expected NAME/ARITY, got %r" % (lineno, chunk))
                name, _, arity = chunk.rpartition("/")
                if name in symbols:
                    raise ParseError("line %d: repeated symbol %r" % (lineno, name))
                try:
                    symbols[name] = int(arity)
                except ValueError:
                    raise ParseError("line %d: bad arity in %r" % (lineno, chunk)) from None
            sig = Signature(symbols)
        elif line.startswith("rule "):
            if sig is None:
                raise ParseError("line %d: rule before sig line" % lineno)
            body = line[5:]
            if ":" not in body:
                raise ParseError("line %d: missing ':' after rule label" % lineno)
            label, _, rest = body.partition(":")
            if "->" not in rest:
                raise ParseError("line %d: missing '->'" % lineno)
            lhs_text, _, rhs_text = rest.partition("->")
            from .terms import parse_term

            try:
                lhs = parse_term(lhs_text, sig)
                rhs = parse_term(rhs_text, sig)
                rules.append(Rule(lhs, rhs, label.strip()))
            except ValueError as exc:
                raise ParseError("line %d: %s" % (lineno, exc)) from None
        else:
            raise ParseError("line %d: unrecognized line %r" % (lineno, line))
    if sig is None:
        raise ParseError("missing sig line")
    return Trs(sig, rules)


# ---------------------------------------------------------------------------
# the rewrite relation


def rewrite_steps(trs: Trs, t: Term) -> set:
    """All one-step successors of t: (result, rule label, position).

    Rules apply left to right only, by one-sided matching of the left-hand
    side against the subterm at each position.
    """
    out = set()
    for pos, sub in positions(t):
        if not isinstance(sub, App):
            continue
        for rule in trs.rules_for_root(sub.symbol):
            bindings = match(rule.lhs, sub)
            if bindings is not None:
                out.add((replace_at(t, pos, apply_substitution(bindings, rule.rhs)), rule.label, pos))
    return out


def _first_step(trs: Trs, t: Term, order) -> tuple | None:
    for pos, sub in order(t):
        if not isinstance(sub, App):
            continue
        for rule in trs.rules_for_root(sub.symbol):
            bindings = match(rule.lhs, sub)
            if bindings is not None:
                return replace_at(t, pos, apply_substitution(bindings, rule.rhs)), rule.label, pos
    return None


def normalize(
    trs: Trs,
    t: Term,
    strategy: str = "leftmost-innermost",
    seed: int = 0,
    max_steps: int | None = None,
):
    """Rewrite t to an irreducible term; returns (normal form, trace).

    The trace lists the (rule label, position) of every step taken.
    Without a step bound the rules must pass the size-decrease check, which
    guarantees termination.
    """
    if strategy not in STRATEGIES:
        raise ValueError("unknown strategy %r" % strategy)
    if max_steps is None and not check_conditions(trs).star_ok:
        raise TerminationNotVerified(
            "rules do not all strictly decrease size; pass max_steps to rewrite anyway"
        )
    rng = Random(seed) if strategy == "random" else None
    trace = []
    current = t
    while True:
        if strategy == "leftmost-innermost":
            step = _first_step(trs, current, positions_postorder)
        elif strategy == "leftmost-outermost":
            step = _first_step(trs, current, positions)
        else:
            options = sorted(rewrite_steps(trs, current), key=lambda s: (s[2], s[1], str(s[0])))
            step = rng.choice(options) if options else None
        if step is None:
            return current, tuple(trace)
        current, label, pos = step
        trace.append((label, pos))
        if max_steps is not None and len(trace) > max_steps:
            raise StepBoundExceeded("no normal form within %d steps" % max_steps)


def reducts(trs: Trs, t: Term, cap: int = DEFAULT_REDUCT_CAP) -> set:
    """The set {t' | t ->* t'}, including t itself.

    Requires the size-decrease check (finiteness then follows from
    termination plus finite branching); the cap is a safety net against a
    non-decreasing system slipping through.
    """
    if not check_conditions(trs).star_ok:
        raise TerminationNotVerified("reduct enumeration requires size-decreasing rules")
    return _reducts_unchecked(trs, t, cap)


def _reducts_unchecked(trs: Trs, t: Term, cap: int) -> set:
    seen = {t}
    frontier = [t]
    while frontier:
        fresh = []
        for u in frontier:
            for v, _label, _pos in rewrite_steps(trs, u):
                if v not in seen:
                    seen.add(v)
                    if len(seen) > cap:
                        raise CapExceeded("reduct set exceeded cap %d" % cap)
                    fresh.append(v)
        frontier = fresh
    return seen


def joinable(trs: Trs, t1: Term, t2: Term, cap: int = DEFAULT_REDUCT_CAP):
    """Whether t1 and t2 have a common reduct; returns (bool, witness).

    The witness is the size-minimal common reduct (ties broken by the term
    ordering), or None.
    """
    r1 = reducts(trs, t1, cap)
    if t2 in r1:  # cheap hit before building the second graph
        return True, t2
    r2 = reducts(trs, t2, cap)
    common = r1 & r2
    if not common:
        return False, None
    return True, min(common, key=term_key)


# ---------------------------------------------------------------------------
# critical pairs and confluence


@dataclass(frozen=True)
class CriticalPair:
    """Two one-step results from a unifiable overlap of rule left sides.

    left/right/peak are canonically renamed (v1, v2, ... in first-occurrence
    order over the peak); mgu is kept in the original rule variables as
    provenance.  peak rewrites to left by rule1 at the root and to right by
    rule2 at `position`.
    """

    left: Term
    right: Term
    peak: Term
    rule1: str
    rule2: str
    position: Position
    mgu: tuple
    trivial: bool

    @property
    def mgu_dict(self) -> Substitution:
        return dict(self.mgu)

    def __str__(self) -> str:
        return "(%s, %s) from %s x %s at %s" % (
            self.left,
            self.right,
            self.rule1,
            self.rule2,
            list(self.position),
        )


def _pair_sort_key(cp: CriticalPair):
    return cp.rule1, cp.rule2, cp.position, str(cp.left), str(cp.right)


def critical_pairs(trs: Trs) -> tuple:
    """All critical pairs of ordered rule pairs, including overlaps of a
    rule with its own renamed copy.

    Pairs whose two sides are syntactically equal (always the case for the
    root overlap of a rule with its own copy) come out flagged trivial.
    """
    out = []
    for rule1 in trs.rules:
        for rule2 in trs.rules:
            renaming = rename_apart((rule1.lhs, rule1.rhs), (rule2.lhs, rule2.rhs))
            l2 = apply_substitution(renaming, rule2.lhs)
            r2 = apply_substitution(renaming, rule2.rhs)
            for pos, sub in positions(rule1.lhs):
                if not isinstance(sub, App):
                    continue
                sigma = unify(sub, l2)
                if sigma is None:
                    continue
                peak = apply_substitution(sigma, rule1.lhs)
                left = apply_substitution(sigma, rule1.rhs)
                right = replace_at(peak, pos, apply_substitution(sigma, r2))
                canon = canonical_renaming((peak, left, right))
                left_c = apply_substitution(canon, left)
                right_c = apply_substitution(canon, right)
                out.append(
                    CriticalPair(
                        left=left_c,
                        right=right_c,
                        peak=apply_substitution(canon, peak),
                        rule1=rule1.label,
                        rule2=rule2.label,
                        position=pos,
                        mgu=tuple(sorted(sigma.items())),
                        trivial=left_c == right_c,
                    )
                )
    out.sort(key=_pair_sort_key)
    return tuple(out)


@dataclass
class ConfluenceVerdict:
    status: str  # confluent | not-confluent | termination-not-verified
    witness: CriticalPair | None = None
    nonjoinable: tuple = ()
    pairs_total: int = 0
    pairs_trivial: int = 0

    @property
    def confluent(self) -> bool:
        return self.status == "confluent"


def check_confluence(trs: Trs, cap: int = DEFAULT_REDUCT_CAP) -> ConfluenceVerdict:
    """Confluent iff every critical pair is joinable (for a terminating
    system).  Termination is certified via the size-decrease check; if that
    fails the verdict is termination-not-verified rather than a guess."""
    if not check_conditions(trs).star_ok:
        return ConfluenceVerdict(status="termination-not-verified")
    pairs = critical_pairs(trs)
    bad = []
    for cp in pairs:
        if cp.trivial:
            continue
        ok, _ = joinable(trs, cp.left, cp.right, cap)
        if not ok:
            bad.append(cp)
    if bad:
        return ConfluenceVerdict(
            status="not-confluent",
            witness=bad[0],
            nonjoinable=tuple(bad),
            pairs_total=len(pairs),
            pairs_trivial=sum(cp.trivial for cp in pairs),
        )
    return ConfluenceVerdict(
        status="confluent",
        pairs_total=len(pairs),
        pairs_trivial=sum(cp.trivial for cp in pairs),
    )


# ---------------------------------------------------------------------------
# syntactic conditions


@dataclass
class ConditionsReport:
    star: dict
    star2: str  # holds | undetermined
    star3: dict

    @property
    def star_ok(self) -> bool:
        return all(self.star.values())

    @property
    def star3_ok(self) -> bool:
        return all(self.star3.values())

    @property
    def ok(self) -> bool:
        return self.star_ok and self.star2 == "holds" and self.star3_ok


def _occurrence_counts(t: Term) -> dict:
    counts = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            counts[u.name] = counts.get(u.name, 0) + 1
        elif isinstance(u, App):
            stack.extend(u.args)
    return counts


def _rule_star(rule: Rule) -> bool:
    lc = _occurrence_counts(rule.lhs)
    rc = _occurrence_counts(rule.rhs)
    if any(rc[v] > lc.get(v, 0) for v in rc):
        return False
    return size(rule.lhs) > size(rule.rhs)


def _rule_star3(rule: Rule) -> bool:
    lhs_vars = variables(rule.lhs)
    for _pos, sub in positions(rule.lhs):
        if isinstance(sub, App) and sub.args and variables(sub) != lhs_vars:
            return False
    return True


def check_conditions(trs: Trs) -> ConditionsReport:
    """Per-rule size/occurrence check, constant-injectivity check, and the
    every-proper-subterm-sees-all-variables check.

    The constant condition is semantic (it quantifies over all nontrivial
    models), so it is only reported `holds` when vacuous (at most one
    constant) and `undetermined` otherwise.
    """
    star = {r.label: _rule_star(r) for r in trs.rules}
    star3 = {r.label: _rule_star3(r) for r in trs.rules}
    star2 = "holds" if len(trs.signature.constants()) <= 1 else "undetermined"
    return ConditionsReport(star=star, star2=star2, star3=star3)


# ---------------------------------------------------------------------------
# completion


@dataclass
class CompletionResult:
    trs: Trs
    rounds: int
    adopted: tuple = ()  # (Rule, CriticalPair) in adoption order


def _canonical_rule_body(lhs: Term, rhs: Term) -> tuple:
    renaming = canonical_renaming((lhs, rhs))
    return apply_substitution(renaming, lhs), apply_substitution(renaming, rhs)


def _fresh_label(used: set, counter: int) -> tuple:
    while True:
        label = "cp%d" % counter
        counter += 1
        if label not in used:
            used.add(label)
            return label, counter


def complete(trs: Trs, max_rounds: int = 10, cap: int = DEFAULT_REDUCT_CAP) -> CompletionResult:
    """Orient non-joinable critical pairs into new rules until confluent.

    Both sides of a pair are normalized first; the larger side becomes the
    new left-hand side.  Orientation is strictly by size; a pair whose
    normal forms have equal size, or whose orientation would violate the
    rule invariants or the size-decrease condition, raises UnorientableError
    rather than guessing.
    """
    if not check_conditions(trs).star_ok:
        raise TerminationNotVerified("completion requires size-decreasing input rules")
    current = trs
    used_labels = {r.label for r in current.rules}
    counter = 1
    adopted = []
    rounds = 0
    while True:
        nonjoinable = [
            cp
            for cp in critical_pairs(current)
            if not cp.trivial and not joinable(current, cp.left, cp.right, cap)[0]
        ]
        if not nonjoinable:
            return CompletionResult(trs=current, rounds=rounds, adopted=tuple(adopted))
        if rounds >= max_rounds:
            raise MaxRoundsExceeded(rounds, current)
        for cp in nonjoinable:
            left_nf, _ = normalize(current, cp.left)
            right_nf, _ = normalize(current, cp.right)
            if left_nf == right_nf:
                continue  # joinable via rules adopted earlier this round
            if size(left_nf) == size(right_nf):
                raise UnorientableError(cp, "equal sizes after normalization")
            big, small = (left_nf, right_nf) if size(left_nf) > size(right_nf) else (right_nf, left_nf)
            lhs, rhs = _canonical_rule_body(big, small)
            if any(_canonical_rule_body(r.lhs, r.rhs) == (lhs, rhs) for r in current.rules):
                continue
            if isinstance(lhs, Var) or variables(rhs) - variables(lhs):
                raise UnorientableError(cp, "candidate violates rule invariants")
            label, counter = _fresh_label(used_labels, counter)
            rule = Rule(lhs, rhs, label)
            if not _rule_star(rule):
                raise UnorientableError(cp, "candidate violates the size-decrease condition")
            current = current.with_rules([rule])
            adopted.append((rule, cp))
        rounds += 1


# ---------------------------------------------------------------------------
# brute-force oracle: local confluence over an enumerated term universe


def enumerate_terms(sig: Signature, max_size: int, num_vars: int = 3) -> list:
    """All terms of size <= max_size over the signature and a fixed pool of
    variables v1..v{num_vars} (complete up to renaming)."""
    leaves = [Var("v%d" % (i + 1)) for i in range(num_vars)]
    leaves += [App(c) for c in sig.constants()]
    by_size = {1: list(leaves)}
    symbols = [(s, k) for s, k in sig.symbols.items() if k >= 1]
    for n in range(2, max_size + 1):
        bucket = []
        for symbol, k in symbols:
            for split in _compositions(n - 1, k):
                if any(s not in by_size for s in split):
                    continue
                for args in itertools.product(*(by_size[s] for s in split)):
                    bucket.append(App(symbol, args))
        by_size[n] = bucket
    out = []
    for n in range(1, max_size + 1):
        out.extend(by_size.get(n, ()))
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass
class OracleVerdict:
    status: str  # confluent | not-confluent | termination-not-verified
    peak: Term | None = None
    pair: tuple | None = None
    peaks_checked: int = 0

    @property
    def confluent(self) -> bool:
        return self.status == "confluent"


def local_confluence_oracle(
    trs: Trs, max_size: int = 6, num_vars: int = 3, cap: int = DEFAULT_REDUCT_CAP
) -> OracleVerdict:
    """Independent confluence check: enumerate every peak up to max_size,
    take all pairs of its one-step reducts and test joinability.  Together
    with verified termination this decides confluence by Newman's lemma,
    without ever looking at critical pairs."""
    if not check_conditions(trs).star_ok:
        return OracleVerdict(status="termination-not-verified")
    checked = 0
    for peak in enumerate_terms(trs.signature, max_size, num_vars):
        steps = sorted(rewrite_steps(trs, peak), key=lambda s: (s[2], s[1], str(s[0])))
        if len(steps) < 2:
            continue
        checked += 1
        succs = []
        for term, _label, _pos in steps:
            if term not in succs:
                succs.append(term)
        for t1, t2 in itertools.combinations(succs, 2):
            ok, _ = joinable(trs, t1, t2, cap)
            if not ok:
                return OracleVerdict(status="not-confluent", peak=peak, pair=(t1, t2), peaks_checked=checked)
    return OracleVerdict(status="confluent", peaks_checked=checked)
