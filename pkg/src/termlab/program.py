"""Restricted while-loop programs: AST, DSL parser, pretty-printer, and one-step semantics.

A program reads a loop guard (a conjunction of ``var > c`` / ``var >= c``
atoms) and, while it holds, lets the user pick one of ``m`` cases. Each case
is a simultaneous assignment; right-hand sides are affine forms, user inputs
(optionally bounded below), or floor division by a constant.

Concrete syntax::

    program prog5
    vars x y : int
    while x > 0 and y > 0
    case 1:
      x := x - 1
      y := x
    case 2:
      x := y - 2
      y := x + 1
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

__all__ = [
    "Affine",
    "GuardAtom",
    "InputAny",
    "InputAtLeast",
    "DivByConst",
    "UpdateRhs",
    "Case",
    "Program",
    "DslError",
    "DslSyntaxError",
    "DslSemanticError",
    "ExecutionError",
    "parse",
    "parse_affine",
    "pretty",
    "guard_holds",
    "guard_lower_bounds",
    "successors",
    "input_updates",
]


class DslError(ValueError):
    """Base class for malformed program text."""


class DslSyntaxError(DslError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DslSemanticError(DslError):
    pass


class ExecutionError(ValueError):
    """Raised when a step cannot be taken (guard false, bad case, bad input)."""


# ---------------------------------------------------------------------------
# Affine forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Affine:
    """An integer affine form ``sum(c_v * v) + const``.

    ``coeffs`` is kept sorted and free of zero coefficients so that equal
    forms compare and hash equal.
    """

    coeffs: tuple[tuple[str, int], ...] = ()
    const: int = 0

    @classmethod
    def of(cls, coeffs: Mapping[str, int] | None = None, const: int = 0) -> "Affine":
        items = tuple(sorted((v, c) for v, c in (coeffs or {}).items() if c != 0))
        return cls(items, const)

    @classmethod
    def var(cls, name: str) -> "Affine":
        return cls(((name, 1),), 0)

    @classmethod
    def constant(cls, value: int) -> "Affine":
        return cls((), value)

    @property
    def mapping(self) -> dict[str, int]:
        return dict(self.coeffs)

    def coeff(self, name: str) -> int:
        for v, c in self.coeffs:
            if v == name:
                return c
        return 0

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def __add__(self, other: "Affine") -> "Affine":
        m = self.mapping
        for v, c in other.coeffs:
            m[v] = m.get(v, 0) + c
        return Affine.of(m, self.const + other.const)

    def __neg__(self) -> "Affine":
        return Affine(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other: "Affine") -> "Affine":
        return self + (-other)

    def scale(self, k: int) -> "Affine":
        return Affine.of({v: c * k for v, c in self.coeffs}, self.const * k)

    def substitute(self, subst: Mapping[str, "Affine"]) -> "Affine":
        """Replace variables by affine forms; unmapped variables stay."""
        out = Affine.constant(self.const)
        for v, c in self.coeffs:
            out = out + (subst[v].scale(c) if v in subst else Affine(((v, c),), 0))
        return out

    def evaluate(self, env: Mapping[str, int]) -> int:
        return self.const + sum(c * env[v] for v, c in self.coeffs)

    def __str__(self) -> str:
        parts: list[str] = []
        for v, c in self.coeffs:
            mag = abs(c)
            term = v if mag == 1 else f"{mag}*{v}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(("+ " if c > 0 else "- ") + term)
        if self.const or not parts:
            if not parts:
                parts.append(str(self.const))
            else:
                parts.append(("+ " if self.const > 0 else "- ") + str(abs(self.const)))
        return " ".join(parts)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GuardAtom:
    var: str
    cmp: str  # ">" or ">="
    bound: int

    def holds(self, value: int) -> bool:
        return value > self.bound if self.cmp == ">" else value >= self.bound

    @property
    def lower_bound(self) -> int:
        """Least integer satisfying the atom."""
        return self.bound + 1 if self.cmp == ">" else self.bound

    def __str__(self) -> str:
        return f"{self.var} {self.cmp} {self.bound}"


@dataclass(frozen=True)
class InputAny:
    """The user supplies any integer."""

    def __str__(self) -> str:
        return "input"


@dataclass(frozen=True)
class InputAtLeast:
    """The user supplies an integer ``>= lower`` (evaluated in the pre-state)."""

    lower: Affine

    def __str__(self) -> str:
        return f"input(>= {self.lower})"


@dataclass(frozen=True)
class DivByConst:
    """Floor division of a variable by a constant ``divisor >= 2``."""

    var: str
    divisor: int

    def __post_init__(self):
        if self.divisor < 2:
            raise DslSemanticError(f"divisor must be >= 2, got {self.divisor}")

    def __str__(self) -> str:
        return f"{self.var} div {self.divisor}"


UpdateRhs = Union[Affine, InputAny, InputAtLeast, DivByConst]


@dataclass(frozen=True)
class Case:
    id: int
    updates: tuple[tuple[str, UpdateRhs], ...]

    @property
    def update_map(self) -> dict[str, UpdateRhs]:
        return dict(self.updates)


@dataclass(frozen=True)
class Program:
    name: str
    vars: tuple[str, ...]
    guard: tuple[GuardAtom, ...]
    cases: tuple[Case, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        _check_well_formed(self)
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vars)})

    @property
    def nvars(self) -> int:
        return len(self.vars)

    @property
    def case_ids(self) -> tuple[int, ...]:
        return tuple(c.id for c in self.cases)

    def case(self, case_id: int) -> Case:
        if not 1 <= case_id <= len(self.cases):
            raise ExecutionError(f"program {self.name} has no case {case_id}")
        return self.cases[case_id - 1]

    def env(self, state: Sequence[int]) -> dict[str, int]:
        if len(state) != len(self.vars):
            raise ExecutionError(
                f"state {tuple(state)} has {len(state)} components, expected {len(self.vars)}"
            )
        return dict(zip(self.vars, state))

    def index(self, var: str) -> int:
        return self._index[var]


def _rhs_vars(rhs: UpdateRhs) -> tuple[str, ...]:
    if isinstance(rhs, Affine):
        return rhs.variables()
    if isinstance(rhs, InputAtLeast):
        return rhs.lower.variables()
    if isinstance(rhs, DivByConst):
        return (rhs.var,)
    return ()


def _check_well_formed(p: Program) -> None:
    if len(set(p.vars)) != len(p.vars):
        raise DslSemanticError(f"duplicate variable in {list(p.vars)}")
    if not p.vars:
        raise DslSemanticError("program declares no variables")
    declared = set(p.vars)
    for atom in p.guard:
        if atom.var not in declared:
            raise DslSemanticError(f"guard references undeclared variable {atom.var!r}")
        if atom.cmp not in (">", ">="):
            raise DslSemanticError(f"bad guard comparison {atom.cmp!r}")
    if not p.cases:
        raise DslSemanticError("program has no cases")
    for expected, case in enumerate(p.cases, start=1):
        if case.id != expected:
            raise DslSemanticError(
                f"case ids must be 1..m in order; found case {case.id} at position {expected}"
            )
        if not case.updates:
            raise DslSemanticError(f"case {case.id} has no updates")
        seen: set[str] = set()
        for target, rhs in case.updates:
            if target not in declared:
                raise DslSemanticError(f"case {case.id} assigns undeclared variable {target!r}")
            if target in seen:
                raise DslSemanticError(f"case {case.id} assigns {target!r} twice")
            seen.add(target)
            for v in _rhs_vars(rhs):
                if v not in declared:
                    raise DslSemanticError(f"case {case.id} references undeclared variable {v!r}")


# ---------------------------------------------------------------------------
# Semantics
# ---------------------------------------------------------------------------


def guard_holds(p: Program, s: Sequence[int]) -> bool:
    env = p.env(s)
    return all(atom.holds(env[atom.var]) for atom in p.guard)


def guard_lower_bounds(p: Program) -> dict[str, int]:
    """Per-variable least value allowed by the guard (absent: unbounded)."""
    out: dict[str, int] = {}
    for atom in p.guard:
        out[atom.var] = max(out.get(atom.var, atom.lower_bound), atom.lower_bound)
    return out


def input_updates(p: Program, case_id: int) -> tuple[str, ...]:
    """Variables of a case that read user input, in declaration order."""
    upd = p.case(case_id).update_map
    return tuple(v for v in p.vars if isinstance(upd.get(v), (InputAny, InputAtLeast)))


def successors(
    p: Program,
    s: Sequence[int],
    case_id: int,
    input_choices: Mapping[str, int] | None = None,
) -> tuple[int, ...]:
    """Apply one case to ``s``; every right-hand side reads the pre-state."""
    if not guard_holds(p, s):
        raise ExecutionError(f"guard of {p.name} fails on {tuple(s)}")
    env = p.env(s)
    choices = dict(input_choices or {})
    case = p.case(case_id)
    post = dict(env)
    for target, rhs in case.updates:
        if isinstance(rhs, Affine):
            post[target] = rhs.evaluate(env)
        elif isinstance(rhs, DivByConst):
            post[target] = env[rhs.var] // rhs.divisor
        else:
            if target not in choices:
                raise ExecutionError(f"case {case_id} needs an input for {target!r}")
            value = choices.pop(target)
            if isinstance(rhs, InputAtLeast):
                lower = rhs.lower.evaluate(env)
                if value < lower:
                    raise ExecutionError(
                        f"input {value} for {target!r} is below its lower bound {lower}"
                    )
            post[target] = value
    if choices:
        raise ExecutionError(f"case {case_id} takes no input for {sorted(choices)}")
    return tuple(post[v] for v in p.vars)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'?)|(?P<op>:=|>=|<=|[-+*():<>=,]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(line):
        if line[pos:].strip() == "":
            break
        m = _TOKEN.match(line, pos)
        if not m:
            col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
            raise DslSyntaxError(f"unexpected character {line[col - 1]!r}", lineno, col)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok], lineno: int, line_len: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.line_len = line_len

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, message: str) -> DslSyntaxError:
        tok = self.peek()
        col = tok.col if tok else self.line_len + 1
        return DslSyntaxError(message, self.lineno, col)

    def take(self, kind: str | None = None, text: str | None = None) -> _Tok:
        tok = self.peek()
        if tok is None or (kind and tok.kind != kind) or (text and tok.text != text):
            want = text or kind
            got = "end of line" if tok is None else repr(tok.text)
            raise self.error(f"expected {want}, got {got}")
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text:
            self.i += 1
            return True
        return False

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def expect_end(self) -> None:
        if not self.done():
            raise self.error(f"unexpected {self.peek().text!r}")


def _parse_int(cur: _Cursor) -> int:
    neg = cur.accept("-")
    value = int(cur.take("int").text)
    return -value if neg else value


def _parse_term(cur: _Cursor) -> Affine:
    tok = cur.peek()
    if tok is None:
        raise cur.error("expected a term")
    if tok.kind == "int":
        value = int(cur.take("int").text)
        if cur.accept("*"):
            return Affine.of({cur.take("ident").text: value})
        return Affine.constant(value)
    if tok.kind == "ident" and tok.text not in _KEYWORDS:
        return Affine.var(cur.take("ident").text)
    raise cur.error(f"expected a term, got {tok.text!r}")


def _parse_affine(cur: _Cursor) -> Affine:
    negate = cur.accept("-")
    expr = _parse_term(cur)
    if negate:
        expr = -expr
    while True:
        tok = cur.peek()
        if tok is not None and tok.text in ("+", "-"):
            cur.i += 1
            term = _parse_term(cur)
            expr = expr + term if tok.text == "+" else expr - term
        else:
            return expr


_KEYWORDS = {"program", "vars", "int", "while", "and", "case", "input", "div"}


def parse_affine(text: str) -> Affine:
    """Parse a standalone affine expression such as ``x + 2*y - 1``."""
    cur = _Cursor(_tokenize(text, 1), 1, len(text))
    expr = _parse_affine(cur)
    cur.expect_end()
    return expr


def _parse_rhs(cur: _Cursor) -> UpdateRhs:
    tok = cur.peek()
    if tok is not None and tok.text == "input":
        cur.take()
        if cur.accept("("):
            cur.take(text=">=")
            lower = _parse_affine(cur)
            cur.take(text=")")
            return InputAtLeast(lower)
        return InputAny()
    if (
        tok is not None
        and tok.kind == "ident"
        and cur.i + 1 < len(cur.toks)
        and cur.toks[cur.i + 1].text == "div"
    ):
        var = cur.take("ident").text
        cur.take(text="div")
        divisor_tok = cur.peek()
        divisor = int(cur.take("int").text)
        if divisor < 2:
            raise DslSyntaxError("divisor must be at least 2", cur.lineno, divisor_tok.col)
        return DivByConst(var, divisor)
    return _parse_affine(cur)


def parse(text: str) -> Program:
    """Parse DSL text into a well-formed :class:`Program`.

    Updates may follow the ``while`` line directly (without a ``case``
    header) for single-case programs; they form case 1.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            lines.append((lineno, body))
    if not lines:
        raise DslSyntaxError("empty program", 1, 1)

    def cursor(k: int) -> _Cursor:
        lineno, body = lines[k]
        return _Cursor(_tokenize(body, lineno), lineno, len(body))

    def missing(what: str) -> DslSyntaxError:
        lineno, body = lines[-1]
        return DslSyntaxError(f"expected {what}, got end of input", lineno + 1, 1)

    k = 0
    cur = cursor(k)
    cur.take(text="program")
    name = cur.take("ident").text
    cur.expect_end()

    k += 1
    if k >= len(lines):
        raise missing("'vars' line")
    cur = cursor(k)
    cur.take(text="vars")
    names = [cur.take("ident").text]
    while not cur.accept(":"):
        names.append(cur.take("ident").text)
    cur.take(text="int")
    cur.expect_end()
    for n in names:
        if n in _KEYWORDS or n.endswith("'"):
            raise DslSyntaxError(f"invalid variable name {n!r}", lines[k][0], 1)

    k += 1
    if k >= len(lines):
        raise missing("'while' line")
    cur = cursor(k)
    cur.take(text="while")
    guard = []
    while True:
        var = cur.take("ident").text
        tok = cur.peek()
        if tok is None or tok.text not in (">", ">="):
            raise cur.error("expected '>' or '>='")
        cur.i += 1
        guard.append(GuardAtom(var, tok.text, _parse_int(cur)))
        if not cur.accept("and"):
            break
    cur.expect_end()

    cases: list[Case] = []
    current_id: int | None = None
    current: list[tuple[str, UpdateRhs]] = []
    seen_ids: set[int] = set()

    def flush():
        if current_id is not None:
            if not current:
                raise DslSemanticError(f"case {current_id} has no updates")
            cases.append(Case(current_id, tuple(current)))

    for k in range(k + 1, len(lines)):
        cur = cursor(k)
        head = cur.peek()
        if head.text == "case":
            flush()
            cur.take()
            id_tok = cur.peek()
            current_id = int(cur.take("int").text)
            cur.take(text=":")
            cur.expect_end()
            if current_id in seen_ids:
                raise DslSemanticError(
                    f"line {cur.lineno}, column {id_tok.col}: duplicate case id {current_id}"
                )
            seen_ids.add(current_id)
            current = []
            continue
        if current_id is None:
            if cases:
                raise cur.error("update outside a case")
            current_id = 1
            seen_ids.add(1)
        target_tok = cur.take("ident")
        cur.take(text=":=")
        current.append((target_tok.text, _parse_rhs(cur)))
        cur.expect_end()
    flush()
    if not cases:
        raise missing("'case' block")

    cases.sort(key=lambda c: c.id)
    return Program(name, tuple(names), tuple(guard), tuple(cases))


def pretty(p: Program) -> str:
    """Render a program in the DSL; ``parse(pretty(p)) == p``."""
    out = [f"program {p.name}", f"vars {' '.join(p.vars)} : int"]
    if p.guard:
        out.append("while " + " and ".join(str(a) for a in p.guard))
    else:
        raise DslSemanticError("programs without a guard have no concrete syntax")
    for case in p.cases:
        out.append(f"case {case.id}:")
        for target, rhs in case.updates:
            out.append(f"  {target} := {rhs}")
    return "\n".join(out) + "\n"


def parse_state(text: str, p: Program | None = None) -> tuple[int, ...]:
    """Parse ``"5,-1"`` or ``"(5, -1)"`` into a state tuple."""
    body = text.strip().strip("()")
    try:
        values = tuple(int(tok) for tok in re.split(r"[,\s]+", body) if tok)
    except ValueError:
        raise ValueError(f"bad state {text!r}") from None
    if p is not None:
        p.env(values)
    return values


def format_state(s: Iterable[int]) -> str:
    return "(" + ", ".join(str(v) for v in s) + ")"
