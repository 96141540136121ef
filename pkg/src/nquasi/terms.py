"""First-order terms over a signature: positions, substitution, matching
and syntactic unification.

A term is an immutable tree.  Leaves are variables (`Var`) or, in amalgam
contexts, elements of finite algebras (`Elem`); inner nodes apply a
signature symbol to argument terms (`App`, constants being zero-argument
applications).  The concrete syntax used throughout the package is `name`
for a leaf, `sym(t1,...,tk)` for an application and bare `sym` for a
constant; whitespace is insignificant and `#` starts a comment running to
the end of the line.  Any identifier that is not a declared symbol parses
as a variable, which keeps the symbol and variable namespaces disjoint.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Elem:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    symbol: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.symbol
        return "%s(%s)" % (self.symbol, ",".join(str(a) for a in self.args))


Term = Union[Var, Elem, App]
Position = tuple
Substitution = dict

_IDENT_RE = re.compile(r"[A-Za-z0-9_.@]+")


class Signature:
    """Finite map from operation-symbol names to arities (>= 0)."""

    def __init__(self, symbols):
        arities = dict(symbols)
        for name, arity in arities.items():
            if not name or not _IDENT_RE.fullmatch(name):
                raise ValueError("bad symbol name: %r" % (name,))
            if not isinstance(arity, int) or arity < 0:
                raise ValueError("bad arity for %s: %r" % (name, arity))
        self._arities = arities

    def arity(self, name: str) -> int:
        return self._arities[name]

    def __contains__(self, name: str) -> bool:
        return name in self._arities

    @property
    def symbols(self) -> Mapping[str, int]:
        return dict(self._arities)

    def constants(self) -> list:
        return [s for s, k in self._arities.items() if k == 0]

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self._arities == other._arities

    def __repr__(self) -> str:
        inner = " ".join("%s/%d" % (s, k) for s, k in self._arities.items())
        return "Signature(%s)" % inner


def size(t: Term) -> int:
    """Number of nodes in the term tree."""
    if isinstance(t, App):
        total = 1
        stack = list(t.args)
        while stack:
            u = stack.pop()
            total += 1
            if isinstance(u, App):
                stack.extend(u.args)
        return total
    return 1


def variables(*terms: Term) -> set:
    """Set of variable names occurring in the given terms."""
    out = set()
    stack = list(terms)
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, App):
            stack.extend(t.args)
    return out


def iter_variables(t: Term) -> Iterator[str]:
    """Variable names in pre-order, left to right, with repeats."""
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, App):
        for a in t.args:
            yield from iter_variables(a)


def elements(*terms: Term) -> set:
    """Set of Elem leaf names occurring in the given terms."""
    out = set()
    stack = list(terms)
    while stack:
        t = stack.pop()
        if isinstance(t, Elem):
            out.add(t.name)
        elif isinstance(t, App):
            stack.extend(t.args)
    return out


def has_elem(t: Term) -> bool:
    if isinstance(t, Elem):
        return True
    if isinstance(t, App):
        return any(has_elem(a) for a in t.args)
    return False


def subterm_at(t: Term, pos: Position) -> Term:
    """Subterm at a position (sequence of 1-based child indices)."""
    for i in pos:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise IndexError("position %r invalid for %s" % (pos, t))
        t = t.args[i - 1]
    return t


def replace_at(t: Term, pos: Position, s: Term) -> Term:
    """Copy of t with the subterm at pos replaced by s."""
    if not pos:
        return s
    i = pos[0]
    if not isinstance(t, App) or not 1 <= i <= len(t.args):
        raise IndexError("position %r invalid for %s" % (pos, t))
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], pos[1:], s)
    return App(t.symbol, tuple(args))


def positions(t: Term, prefix: Position = ()) -> Iterator[tuple]:
    """(position, subterm) pairs in pre-order (root first)."""
    yield prefix, t
    if isinstance(t, App):
        for i, a in enumerate(t.args, start=1):
            yield from positions(a, prefix + (i,))


def positions_postorder(t: Term, prefix: Position = ()) -> Iterator[tuple]:
    """(position, subterm) pairs with children before their parent."""
    if isinstance(t, App):
        for i, a in enumerate(t.args, start=1):
            yield from positions_postorder(a, prefix + (i,))
    yield prefix, t


def apply_substitution(sigma: Substitution, t: Term) -> Term:
    """Homomorphic extension of sigma; fixes Elem leaves and unbound variables."""
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, App) and t.args:
        return App(t.symbol, tuple(apply_substitution(sigma, a) for a in t.args))
    return t


def occurs(name: str, t: Term) -> bool:
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, App):
        return any(occurs(name, a) for a in t.args)
    return False


def match(pattern: Term, subject: Term) -> Substitution | None:
    """One-sided matching: sigma with sigma(pattern) == subject, or None.

    Elem leaves in the pattern match only the identical Elem.
    """
    bindings = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = bindings.get(p.name)
            if bound is None:
                bindings[p.name] = s
            elif bound != s:
                return None
        elif isinstance(p, App):
            if not isinstance(s, App) or p.symbol != s.symbol or len(p.args) != len(s.args):
                return None
            stack.extend(zip(p.args, s.args))
        else:  # Elem
            if p != s:
                return None
    return bindings


def unify(s: Term, t: Term) -> Substitution | None:
    """Most general unifier of s and t, or None if they do not unify.

    The result is idempotent with domain inside Var(s, t); occurs-check
    failures and symbol clashes both report no unifier.  Elem leaves are
    not allowed here.
    """
    if has_elem(s) or has_elem(t):
        raise ValueError("unify does not accept terms with element leaves")
    sub: Substitution = {}
    work = [(s, t)]
    while work:
        a, b = work.pop()
        a = apply_substitution(sub, a)
        b = apply_substitution(sub, b)
        if a == b:
            continue
        if isinstance(a, Var):
            if occurs(a.name, b):
                return None
            one = {a.name: b}
            for k in sub:
                sub[k] = apply_substitution(one, sub[k])
            sub[a.name] = b
        elif isinstance(b, Var):
            if occurs(b.name, a):
                return None
            one = {b.name: a}
            for k in sub:
                sub[k] = apply_substitution(one, sub[k])
            sub[b.name] = a
        elif (
            isinstance(a, App)
            and isinstance(b, App)
            and a.symbol == b.symbol
            and len(a.args) == len(b.args)
        ):
            work.extend(zip(a.args, b.args))
        else:
            return None
    return sub


def rename_apart(fixed, movable) -> Substitution:
    """Variable renaming for `movable` making its variables disjoint from
    those of `fixed`.

    Fresh names are v1, v2, ... skipping anything already in use on either
    side; variables of `movable` that cause no collision are kept, so
    already-disjoint inputs get the identity renaming.
    """
    taken = set()
    for t in fixed:
        taken |= variables(t)
    movable_vars = []
    seen = set()
    for t in movable:
        for name in iter_variables(t):
            if name not in seen:
                seen.add(name)
                movable_vars.append(name)
    used = taken | seen
    renaming: Substitution = {}
    counter = 1
    for name in movable_vars:
        if name in taken:
            while "v%d" % counter in used:
                counter += 1
            fresh = "v%d" % counter
            used.add(fresh)
            renaming[name] = Var(fresh)
    return renaming


def canonical_renaming(terms) -> Substitution:
    """Renaming to v1, v2, ... in left-to-right first-occurrence order."""
    order = []
    seen = set()
    for t in terms:
        for name in iter_variables(t):
            if name not in seen:
                seen.add(name)
                order.append(name)
    return {name: Var("v%d" % (i + 1)) for i, name in enumerate(order)}


def check_well_formed(sig: Signature, t: Term) -> None:
    """Raise ValueError unless every App node uses a declared symbol with
    the right number of arguments."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            if u.symbol not in sig:
                raise ValueError("undeclared symbol %r in %s" % (u.symbol, t))
            if sig.arity(u.symbol) != len(u.args):
                raise ValueError(
                    "symbol %s expects %d arguments, got %d in %s"
                    % (u.symbol, sig.arity(u.symbol), len(u.args), t)
                )
            stack.extend(u.args)


class ParseError(ValueError):
    pass


def strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def _tokenize(text: str) -> list:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "(),":
            tokens.append(c)
            i += 1
            continue
        m = _IDENT_RE.match(text, i)
        if not m:
            raise ParseError("unexpected character %r in term" % c)
        tokens.append(m.group())
        i = m.end()
    return tokens


def parse_term(text: str, sig: Signature) -> Term:
    """Parse the concrete term syntax.  Identifiers not in the signature
    become variables; declared symbols must be applied at their arity."""
    tokens = _tokenize(strip_comments(text))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of term in %r" % text)
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise ParseError("expected %r, found %r in %r" % (expected, tok, text))
        pos += 1
        return tok

    def term():
        name = take()
        if name in "(),":
            raise ParseError("unexpected %r in %r" % (name, text))
        if peek() == "(":
            if name not in sig:
                raise ParseError("undeclared symbol %r in %r" % (name, text))
            take("(")
            args = [term()]
            while peek() == ",":
                take(",")
                args.append(term())
            take(")")
            if sig.arity(name) != len(args):
                raise ParseError(
                    "symbol %s expects %d arguments, got %d" % (name, sig.arity(name), len(args))
                )
            return App(name, tuple(args))
        if name in sig:
            if sig.arity(name) != 0:
                raise ParseError("symbol %s expects %d arguments" % (name, sig.arity(name)))
            return App(name)
        return Var(name)

    result = term()
    if pos != len(tokens):
        raise ParseError("trailing input %r in %r" % (tokens[pos:], text))
    return result


def term_key(t: Term):
    """Total order key: by size, then by rendered text."""
    return size(t), str(t)
