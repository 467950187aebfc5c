"""Categories of applicative categorial grammar with associativity.

A category is a head atom together with three argument lists:

* ``left``  -- arguments expected to the left, nearest first
* ``right`` -- arguments expected to the right, nearest first
* ``headed`` -- the prefix of ``left`` whose fillers have already been
  seen but whose head word has not (only ever non-empty inside parser
  states; lexical categories carry an empty headed list at every depth)

Curried slash notation (``(np\\s)/np``) is supported as an authoring
format and converted to the list form by :func:`flatten`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

__all__ = [
    "Category",
    "Slash",
    "SlashExpr",
    "CategorySyntaxError",
    "atom",
    "parse_slash",
    "render_slash",
    "flatten",
    "to_curried",
    "parse_category",
    "render_category",
    "is_prefix",
    "is_suffix",
]

_ATOM_RE = re.compile(r"[A-Za-z0-9_]+")


class CategorySyntaxError(ValueError):
    """Malformed category text; ``pos`` is the 0-based character offset."""

    def __init__(self, message, text, pos):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


class Category:
    """Immutable recursive category ``head{l:[...],r:[...],h:[...]}``."""

    __slots__ = ("head", "left", "right", "headed", "_hash")

    def __init__(self, head: str, left=(), right=(), headed=()):
        if not _ATOM_RE.fullmatch(head):
            raise ValueError(f"invalid atom name {head!r}")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "left", tuple(left))
        object.__setattr__(self, "right", tuple(right))
        object.__setattr__(self, "headed", tuple(headed))
        object.__setattr__(
            self, "_hash", hash((head, self.left, self.right, self.headed))
        )

    def __setattr__(self, name, value):
        raise AttributeError("Category is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Category):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.head == other.head
            and self.left == other.left
            and self.right == other.right
            and self.headed == other.headed
        )

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Category, (self.head, self.left, self.right, self.headed))

    def __repr__(self):
        return f"Category({render_category(self)!r})"

    def __str__(self):
        return render_category(self)

    @property
    def is_atomic(self) -> bool:
        return not (self.left or self.right or self.headed)

    def replace(self, *, head=None, left=None, right=None, headed=None) -> "Category":
        return Category(
            self.head if head is None else head,
            self.left if left is None else left,
            self.right if right is None else right,
            self.headed if headed is None else headed,
        )

    def is_lexical(self) -> bool:
        """True iff the headed list is empty here and at every nested depth."""
        if self.headed:
            return False
        return all(c.is_lexical() for c in self.left) and all(
            c.is_lexical() for c in self.right
        )

    def is_state_argument(self) -> bool:
        """Headed list is a prefix of the left list; everything nested is lexical."""
        if not is_prefix(self.headed, self.left):
            return False
        return all(c.is_lexical() for c in self.left + self.right + self.headed)


def atom(name: str) -> Category:
    return Category(name)


def is_prefix(prefix, seq) -> bool:
    n = len(prefix)
    return n <= len(seq) and tuple(seq[:n]) == tuple(prefix)


def is_suffix(suffix, seq) -> bool:
    n = len(suffix)
    if n == 0:
        return True
    return n <= len(seq) and tuple(seq[-n:]) == tuple(suffix)


# ---------------------------------------------------------------------------
# Curried slash notation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Slash:
    """``left / right`` (argument on the right) or ``left \\ right``
    (Lambek order: argument ``left`` on the left, result ``right``)."""

    left: "SlashExpr"
    direction: str
    right: "SlashExpr"

    def __post_init__(self):
        if self.direction not in ("/", "\\"):
            raise ValueError(f"bad slash direction {self.direction!r}")

    def __str__(self):
        return render_slash(self)


SlashExpr = Union[str, Slash]


def parse_slash(text: str) -> SlashExpr:
    """Parse slash notation; slashes are left-associative at equal precedence."""
    p = _SlashParser(text)
    expr = p.expr()
    p.skip_ws()
    if p.pos != len(text):
        p.fail("unexpected character")
    return expr


class _SlashParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def fail(self, message):
        raise CategorySyntaxError(message, self.text, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expr(self):
        left = self.operand()
        while True:
            self.skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] in "/\\":
                direction = self.text[self.pos]
                self.pos += 1
                right = self.operand()
                left = Slash(left, direction, right)
            else:
                return left

    def operand(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            self.fail("empty operand")
        ch = self.text[self.pos]
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            self.skip_ws()
            if self.pos >= len(self.text) or self.text[self.pos] != ")":
                self.fail("unbalanced parenthesis")
            self.pos += 1
            return inner
        m = _ATOM_RE.match(self.text, self.pos)
        if not m:
            self.fail("empty operand")
        self.pos = m.end()
        return m.group()


def render_slash(e: SlashExpr) -> str:
    if isinstance(e, str):
        return e

    def operand(x):
        return x if isinstance(x, str) else f"({render_slash(x)})"

    return f"{operand(e.left)}{e.direction}{operand(e.right)}"


def flatten(e: SlashExpr) -> Category:
    """Convert curried notation to the associative list form."""
    if isinstance(e, str):
        return Category(e)
    if e.direction == "/":
        core = flatten(e.left)
        return Category(core.head, core.left, (flatten(e.right),) + core.right)
    core = flatten(e.right)
    return Category(core.head, (flatten(e.left),) + core.left, core.right)


def to_curried(c: Category) -> SlashExpr:
    """Canonical curried form: left arguments innermost, then right arguments."""
    if c.headed:
        raise ValueError(f"cannot curry a category with a headed list: {c}")
    expr: SlashExpr = c.head
    for arg in reversed(c.left):
        expr = Slash(to_curried(arg), "\\", expr)
    for arg in reversed(c.right):
        expr = Slash(expr, "/", to_curried(arg))
    return expr


# ---------------------------------------------------------------------------
# Compact text form: atom{l:[...],r:[...],h:[...]}
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def render_category(c: Category) -> str:
    if c.is_atomic:
        return c.head
    parts = []
    for key, items in (("l", c.left), ("r", c.right), ("h", c.headed)):
        if items:
            parts.append(f"{key}:[{','.join(render_category(x) for x in items)}]")
    return f"{c.head}{{{','.join(parts)}}}"


def parse_category(text: str) -> Category:
    p = _CatParser(text)
    cat = p.category()
    p.skip_ws()
    if p.pos != len(text):
        p.fail("unexpected character")
    return cat


class _CatParser(_SlashParser):
    def expect(self, ch):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def category(self):
        self.skip_ws()
        m = _ATOM_RE.match(self.text, self.pos)
        if not m:
            self.fail("expected atom")
        self.pos = m.end()
        head = m.group()
        lists = {"l": (), "r": (), "h": ()}
        if self.peek() != "{":
            return Category(head)
        self.pos += 1
        seen = []
        while True:
            key = self.peek()
            if key not in lists or key in seen:
                self.fail("expected one of l, r, h")
            order = "lrh"
            if seen and order.index(key) < order.index(seen[-1]):
                self.fail("lists out of order")
            seen.append(key)
            self.pos += 1
            self.expect(":")
            lists[key] = self.items()
            if self.peek() == ",":
                self.pos += 1
                continue
            self.expect("}")
            break
        return Category(head, lists["l"], lists["r"], lists["h"])

    def items(self):
        self.expect("[")
        out = []
        if self.peek() == "]":
            self.pos += 1
            return tuple(out)
        while True:
            out.append(self.category())
            if self.peek() == ",":
                self.pos += 1
                continue
            self.expect("]")
            return tuple(out)
