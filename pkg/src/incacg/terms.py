"""Untyped lambda calculus with constants.

Terms are immutable named trees (:class:`Var`, :class:`Const`,
:class:`Abs`, :class:`App`).  Reduction and alpha-equivalence work on a
nameless (de Bruijn) encoding; binder names survive normalisation as
display hints and are renamed only to avoid clashes.

Text syntax::

    \\x. body          abstraction; the body extends as far right as possible
    f x y              application by juxtaposition, ((f x) y)
    f(x, y)            call sugar, also ((f x) y)
    likes'             names ending in a prime are constants
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

__all__ = [
    "Var",
    "Const",
    "Abs",
    "App",
    "Term",
    "TermSyntaxError",
    "FuelExhausted",
    "DEFAULT_FUEL",
    "abs_n",
    "app_n",
    "free_vars",
    "free_names",
    "constants",
    "substitute",
    "beta_normalize",
    "normalize",
    "is_normal",
    "alpha_eq",
    "alpha_key",
    "canonical_names",
    "eta_equivalent",
    "parse_term",
    "render_term",
]

DEFAULT_FUEL = 10_000


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return render_term(self)


@dataclass(frozen=True, slots=True)
class Const:
    name: str

    def __str__(self):
        return render_term(self)


@dataclass(frozen=True, slots=True)
class Abs:
    var: str
    body: "Term"

    def __str__(self):
        return render_term(self)


@dataclass(frozen=True, slots=True)
class App:
    fn: "Term"
    arg: "Term"

    def __str__(self):
        return render_term(self)


Term = Union[Var, Const, Abs, App]


class FuelExhausted(RuntimeError):
    """Normalisation did not finish within the step budget."""

    def __init__(self, fuel):
        super().__init__(f"beta reduction exceeded {fuel} steps")
        self.fuel = fuel


def abs_n(names: Iterable[str], body: Term) -> Term:
    for name in reversed(list(names)):
        body = Abs(name, body)
    return body


def app_n(fn: Term, args: Iterable[Term]) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def free_vars(t: Term) -> frozenset:
    """Names of free :class:`Var` occurrences."""
    out = set()
    _free(t, frozenset(), out)
    return frozenset(out)


def _free(t, bound, out):
    while True:
        if isinstance(t, Var):
            if t.name not in bound:
                out.add(t.name)
            return
        if isinstance(t, Abs):
            bound = bound | {t.var}
            t = t.body
        elif isinstance(t, App):
            _free(t.fn, bound, out)
            t = t.arg
        else:
            return


def constants(t: Term) -> frozenset:
    out = set()
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Const):
            out.add(t.name)
        elif isinstance(t, Abs):
            stack.append(t.body)
        elif isinstance(t, App):
            stack.append(t.fn)
            stack.append(t.arg)
    return frozenset(out)


def free_names(t: Term) -> frozenset:
    return free_vars(t) | constants(t)


def _all_var_names(t, out):
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, Abs):
            out.add(t.var)
            stack.append(t.body)
        elif isinstance(t, App):
            stack.append(t.fn)
            stack.append(t.arg)
    return out


def _fresh(base: str, avoid) -> str:
    base = base.rstrip("0123456789") or "x"
    i = 0
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(t: Term, v: str, s: Term) -> Term:
    """Capture-avoiding ``t[v := s]``."""
    fv_s = free_vars(s)
    if v not in free_vars(t):
        return t
    return _subst(t, v, s, fv_s)


def _subst(t, v, s, fv_s):
    if isinstance(t, Var):
        return s if t.name == v else t
    if isinstance(t, App):
        return App(_subst(t.fn, v, s, fv_s), _subst(t.arg, v, s, fv_s))
    if isinstance(t, Abs):
        if t.var == v:
            return t
        fv_body = free_vars(t.body)
        if v not in fv_body:
            return t
        if t.var in fv_s:
            avoid = set(fv_s) | _all_var_names(t.body, set()) | {v}
            new = _fresh(t.var, avoid)
            body = _subst(t.body, t.var, Var(new), frozenset({new}))
            return Abs(new, _subst(body, v, s, fv_s))
        return Abs(t.var, _subst(t.body, v, s, fv_s))
    return t


# ---------------------------------------------------------------------------
# Nameless encoding
#
#   ("v", i)              bound variable, de Bruijn index i
#   ("f", name)           free variable
#   ("c", name)           constant
#   ("l", hint, body)     abstraction; hint is the display name
#   ("a", fn, arg)        application
# ---------------------------------------------------------------------------


def _to_nameless(t, env=None, depth=0):
    if env is None:
        env = {}
    if isinstance(t, Var):
        d = env.get(t.name)
        if d is None:
            return ("f", t.name)
        return ("v", depth - 1 - d)
    if isinstance(t, Const):
        return ("c", t.name)
    if isinstance(t, App):
        return ("a", _to_nameless(t.fn, env, depth), _to_nameless(t.arg, env, depth))
    saved = env.get(t.var)
    env[t.var] = depth
    body = _to_nameless(t.body, env, depth + 1)
    if saved is None:
        del env[t.var]
    else:
        env[t.var] = saved
    return ("l", t.var, body)


def _shift(t, d, cutoff=0):
    tag = t[0]
    if tag == "v":
        return ("v", t[1] + d) if t[1] >= cutoff else t
    if tag == "a":
        return ("a", _shift(t[1], d, cutoff), _shift(t[2], d, cutoff))
    if tag == "l":
        return ("l", t[1], _shift(t[2], d, cutoff + 1))
    return t


def _subst_top(body, arg, depth=0):
    """``body[0 := arg]`` for the body of a redex, dropping one binder."""
    tag = body[0]
    if tag == "v":
        i = body[1]
        if i == depth:
            return _shift(arg, depth) if depth else arg
        if i > depth:
            return ("v", i - 1)
        return body
    if tag == "a":
        return ("a", _subst_top(body[1], arg, depth), _subst_top(body[2], arg, depth))
    if tag == "l":
        return ("l", body[1], _subst_top(body[2], arg, depth + 1))
    return body


class _Fuel:
    __slots__ = ("limit", "used")

    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.limit:
            raise FuelExhausted(self.limit)


def _whnf(t, fuel):
    while t[0] == "a":
        f = _whnf(t[1], fuel)
        if f[0] != "l":
            return ("a", f, t[2])
        fuel.spend()
        t = _subst_top(f[2], t[2])
    return t


def _nf(t, fuel):
    # leftmost-outermost: head-reduce first, then normalise the pieces
    tag = t[0]
    if tag == "l":
        return ("l", t[1], _nf(t[2], fuel))
    if tag == "a":
        f = _whnf(t[1], fuel)
        if f[0] == "l":
            fuel.spend()
            return _nf(_subst_top(f[2], t[2]), fuel)
        return ("a", _nf(f, fuel), _nf(t[2], fuel))
    return t


def _nameless_free(t, out):
    stack = [t]
    while stack:
        t = stack.pop()
        tag = t[0]
        if tag == "f" or tag == "c":
            out.add(t[1])
        elif tag == "a":
            stack.append(t[1])
            stack.append(t[2])
        elif tag == "l":
            stack.append(t[2])
    return out


def _from_nameless(t, avoid=None):
    if avoid is None:
        avoid = _nameless_free(t, set())
    return _readback(t, [], set(avoid))


def _readback(t, names, taken):
    tag = t[0]
    if tag == "v":
        return Var(names[len(names) - 1 - t[1]])
    if tag == "f":
        return Var(t[1])
    if tag == "c":
        return Const(t[1])
    if tag == "a":
        return App(_readback(t[1], names, taken), _readback(t[2], names, taken))
    name = t[1]
    if name in taken:
        name = _fresh(name, taken)
    names.append(name)
    taken.add(name)
    try:
        body = _readback(t[2], names, taken)
    finally:
        names.pop()
        taken.discard(name)
    return Abs(name, body)


def beta_normalize(t: Term, fuel: int = DEFAULT_FUEL):
    """Normal-order reduction to beta-normal form.

    Returns ``(normal_form, steps)``; raises :class:`FuelExhausted` when
    more than ``fuel`` beta steps would be needed.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    counter = _Fuel(fuel)
    nl = _nf(_to_nameless(t), counter)
    return _from_nameless(nl), counter.used


def normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    return beta_normalize(t, fuel)[0]


def is_normal(t: Term) -> bool:
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, App):
            if isinstance(t.fn, Abs):
                return False
            stack.append(t.fn)
            stack.append(t.arg)
        elif isinstance(t, Abs):
            stack.append(t.body)
    return True


def _strip(t):
    tag = t[0]
    if tag == "l":
        return ("l", _strip(t[2]))
    if tag == "a":
        return ("a", _strip(t[1]), _strip(t[2]))
    return t


def alpha_key(t: Term):
    """Hashable canonical form; equal keys iff alpha-equivalent."""
    return _strip(_to_nameless(t))


def alpha_eq(a: Term, b: Term) -> bool:
    return alpha_key(a) == alpha_key(b)


_CANON = ("x", "y", "z", "w", "v", "u")


def canonical_names(t: Term) -> Term:
    """Rename binders deterministically: x, y, z, w, v, u, x1, y1, ..."""
    nl = _to_nameless(t)
    free = _nameless_free(nl, set())
    counter = [0]

    def next_name():
        while True:
            i = counter[0]
            counter[0] += 1
            base = _CANON[i % len(_CANON)]
            rnd = i // len(_CANON)
            name = base if rnd == 0 else f"{base}{rnd}"
            if name not in free:
                return name

    def relabel(t):
        tag = t[0]
        if tag == "l":
            return ("l", next_name(), relabel(t[2]))
        if tag == "a":
            return ("a", relabel(t[1]), relabel(t[2]))
        return t

    return _from_nameless(relabel(nl), free)


def eta_equivalent(a: Term, b: Term, fuel: int = DEFAULT_FUEL) -> bool:
    """True iff the beta-normal forms agree after eta-contraction.

    Used only to flag near-misses; readings are compared by alpha_eq.
    """
    return _eta(_nf(_to_nameless(a), _Fuel(fuel))) == _eta(
        _nf(_to_nameless(b), _Fuel(fuel))
    )


def _occurs(t, i):
    tag = t[0]
    if tag == "v":
        return t[1] == i
    if tag == "a":
        return _occurs(t[1], i) or _occurs(t[2], i)
    if tag == "l":
        return _occurs(t[2], i + 1)
    return False


def _eta(t):
    tag = t[0]
    if tag == "a":
        return ("a", _eta(t[1]), _eta(t[2]))
    if tag == "l":
        body = _eta(t[2])
        if body[0] == "a" and body[2] == ("v", 0) and not _occurs(body[1], 0):
            return _shift(body[1], -1)
        return ("l", body)
    return t


# ---------------------------------------------------------------------------
# Text syntax
# ---------------------------------------------------------------------------


class TermSyntaxError(ValueError):
    def __init__(self, message, text, pos):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<punct>[\\λ.(),]))"
)


def _tokenize(text):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            out.append(("end", "", pos))
            return out
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise TermSyntaxError("unexpected character", text, pos)
        start = m.start("name") if m.group("name") else m.start("punct")
        if m.group("name"):
            out.append(("name", m.group("name"), start))
        else:
            p = m.group("punct")
            out.append(("punct", "\\" if p == "λ" else p, start))
        pos = m.end()


class _TermParser:
    def __init__(self, text, constants):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.constants = constants

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise TermSyntaxError(message, self.text, tok[2])

    def expect(self, value):
        tok = self.advance()
        if tok[1] != value or tok[0] == "name":
            self.fail(f"expected {value!r}", tok)
        return tok

    def term(self, bound):
        if self.peek()[1] == "\\" and self.peek()[0] == "punct":
            self.advance()
            names = []
            while self.peek()[0] == "name":
                tok = self.advance()
                if tok[1].endswith("'"):
                    self.fail("binder names cannot end with a prime", tok)
                names.append(tok[1])
            if not names:
                self.fail("expected binder name")
            self.expect(".")
            body = self.term(bound | set(names))
            return abs_n(names, body)
        fn = self.postfix(bound)
        while True:
            kind, value, _ = self.peek()
            if kind == "name" or (kind == "punct" and value == "\\"):
                if value == "\\":
                    fn = App(fn, self.term(bound))
                    return fn
                fn = App(fn, self.postfix(bound))
            else:
                return fn

    def postfix(self, bound):
        t = self.atom(bound)
        # call sugar: f(a, b) == ((f a) b); "f (a)" means the same either way
        while True:
            kind, value, _ = self.peek()
            if kind == "punct" and value == "(":
                self.advance()
                args = [self.term(bound)]
                while self.peek()[1] == ",":
                    self.advance()
                    args.append(self.term(bound))
                self.expect(")")
                t = app_n(t, args)
            else:
                return t

    def atom(self, bound):
        tok = self.advance()
        kind, value, _ = tok
        if kind == "name":
            if value in bound:
                return Var(value)
            if value.endswith("'") or value in self.constants:
                return Const(value)
            return Var(value)
        if kind == "punct" and value == "(":
            inner = self.term(bound)
            if self.peek()[1] == ",":
                self.fail("argument list without a function")
            self.expect(")")
            return inner
        self.fail("expected a term", tok)


def parse_term(text: str, constants: Iterable[str] = ()) -> Term:
    """Parse term text.

    Unbound names are constants when primed or listed in ``constants``,
    free variables otherwise.
    """
    p = _TermParser(text, frozenset(constants))
    t = p.term(frozenset())
    if p.peek()[0] != "end":
        p.fail("unexpected token")
    return t


def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Abs):
        binders = []
        while isinstance(t, Abs):
            binders.append(f"\\{t.var}.")
            t = t.body
        return "".join(binders) + " " + render_term(t)
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    head = t.name if isinstance(t, (Var, Const)) else f"({render_term(t)})"
    return f"{head}({','.join(render_term(a) for a in args)})"
