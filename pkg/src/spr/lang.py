"""Core language: labeled statements, branch conditions, parsing, rendering.

A program is a pair of finite maps over opaque labels plus an entry label:
``stmt_of`` gives each label its statement, ``next_of`` gives the fall-through
successor for statements that need one (assignments, reads, prints, skip).
Branches carry both targets inline; stop has no successor.

Concrete syntax is line oriented::

    L0: x = read -> L1        # read one integer
    L1: if ((x == 5)) L2 L3
    L2: print 1 -> L4
    L3: print 0 -> L4
    L4: stop

``#`` starts a comment. Variables match [a-z][a-z0-9_]*, labels are
uppercase-initial identifiers, integers are optionally signed decimals.
The tokens ``abstc`` and ``abstval`` and the ``G<n>`` label namespace are
reserved for machine-generated patch templates and rejected in user files.

Arithmetic wraps modulo 2**64 and is interpreted as signed 64-bit;
comparisons yield 0 or 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class ProgramError(Exception):
    """Base class for malformed programs."""


class ParseError(ProgramError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateLabelError(ProgramError):
    pass


class UndefinedLabelError(ProgramError):
    pass


# ---------------------------------------------------------------------------
# Signed 64-bit arithmetic
# ---------------------------------------------------------------------------

_BOUND = 1 << 63
_MASK = (1 << 64) - 1


def wrap64(n: int) -> int:
    """Wrap an unbounded int into signed 64-bit two's complement."""
    return ((n + _BOUND) & _MASK) - _BOUND


def _div(a: int, b: int) -> int:
    # C-style truncation toward zero; b == 0 raises ZeroDivisionError.
    q = a // b
    if q < 0 and q * b != a:
        q += 1
    return q


def _mod(a: int, b: int) -> int:
    return a - b * _div(a, b)


BINOPS = {
    "+": lambda a, b: wrap64(a + b),
    "-": lambda a, b: wrap64(a - b),
    "*": lambda a, b: wrap64(a * b),
    "/": lambda a, b: wrap64(_div(a, b)),
    "%": lambda a, b: wrap64(_mod(a, b)),
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
}

CMP_OPS = ("==", "<", ">")  # operators allowed inside branch conditions


# ---------------------------------------------------------------------------
# Condition expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: int  # 0 or 1


@dataclass(frozen=True)
class Cmp:
    """Comparison of a variable against a constant or another variable.

    The baseline repair space only ever generates equality against a
    constant; ``<``/``>`` and variable right-hand sides exist so extended
    repairs remain expressible and reparseable.
    """

    lhs: str
    op: str  # one of CMP_OPS
    rhs: int | str


@dataclass(frozen=True)
class Not:
    operand: "Cond"


@dataclass(frozen=True)
class And:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Or:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class AbstCond:
    """The abstract-condition placeholder (token ``abstc``)."""


Cond = Lit | Cmp | Not | And | Or | AbstCond

ABSTC = AbstCond()


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Stop:
    pass


@dataclass(frozen=True)
class Assign:
    """dst = left op right, operands are variables or integer constants."""

    dst: str
    left: int | str
    op: str
    right: int | str


@dataclass(frozen=True)
class ConstAssign:
    dst: str
    value: int


@dataclass(frozen=True)
class Read:
    dst: str


@dataclass(frozen=True)
class PrintVar:
    name: str


@dataclass(frozen=True)
class PrintConst:
    value: int


@dataclass(frozen=True)
class PrintAbst:
    """The abstract-value print placeholder (``print abstval``)."""


@dataclass(frozen=True)
class Branch:
    cond: Cond
    on_true: str
    on_false: str


Statement = Skip | Stop | Assign | ConstAssign | Read | PrintVar | PrintConst | PrintAbst | Branch

SIMPLE_STATEMENT_TYPES = (Assign, ConstAssign, Read, PrintVar, PrintConst)


@dataclass(frozen=True)
class Program:
    stmt_of: dict[str, Statement]
    next_of: dict[str, str]
    entry: str

    def labels(self) -> list[str]:
        return sorted(self.stmt_of, key=label_key)


_LABEL_NUM = re.compile(r"([A-Za-z_]+?)(\d+)\Z")


def label_key(label: str) -> tuple[str, int]:
    """Natural ordering key: L2 before L10, G1 before L0."""
    m = _LABEL_NUM.match(label)
    if m:
        return (m.group(1), int(m.group(2)))
    return (label, -1)


RESERVED_LABEL = re.compile(r"G\d+\Z")
_VAR_RE = re.compile(r"[a-z][a-z0-9_]*\Z")
_LABEL_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
_INT_RE = re.compile(r"-?\d+\Z")
_RESERVED_WORDS = frozenset({"skip", "stop", "print", "read", "if", "abstc", "abstval"})


def is_variable(token: str) -> bool:
    return bool(_VAR_RE.match(token)) and token not in _RESERVED_WORDS


def is_label(token: str) -> bool:
    return bool(_LABEL_RE.match(token))


# ---------------------------------------------------------------------------
# Structure queries
# ---------------------------------------------------------------------------

def _cond_vars(cond: Cond) -> set[str]:
    match cond:
        case Cmp(lhs=lhs, rhs=rhs):
            out = {lhs}
            if isinstance(rhs, str):
                out.add(rhs)
            return out
        case Not(operand=x):
            return _cond_vars(x)
        case And(left=l, right=r) | Or(left=l, right=r):
            return _cond_vars(l) | _cond_vars(r)
        case _:
            return set()


def _stmt_vars(stmt: Statement) -> set[str]:
    match stmt:
        case Assign(dst=d, left=l, right=r):
            out = {d}
            if isinstance(l, str):
                out.add(l)
            if isinstance(r, str):
                out.add(r)
            return out
        case ConstAssign(dst=d) | Read(dst=d):
            return {d}
        case PrintVar(name=n):
            return {n}
        case Branch(cond=c):
            return _cond_vars(c)
        case _:
            return set()


def vars_of(scope: Program | Statement) -> set[str]:
    """All variable names appearing in a statement or a whole program."""
    if isinstance(scope, Program):
        out: set[str] = set()
        for stmt in scope.stmt_of.values():
            out |= _stmt_vars(stmt)
        return out
    return _stmt_vars(scope)


def _cond_consts(cond: Cond) -> set[int]:
    match cond:
        case Cmp(rhs=rhs) if isinstance(rhs, int):
            return {rhs}
        case Not(operand=x):
            return _cond_consts(x)
        case And(left=l, right=r) | Or(left=l, right=r):
            return _cond_consts(l) | _cond_consts(r)
        case _:
            return set()


def consts_of(prog: Program) -> set[int]:
    """Integer constants in assignments, prints and comparisons.

    Bare condition literals 1/0 are booleans, not program constants.
    """
    out: set[int] = set()
    for stmt in prog.stmt_of.values():
        match stmt:
            case ConstAssign(value=v) | PrintConst(value=v):
                out.add(v)
            case Assign(left=l, right=r):
                if isinstance(l, int):
                    out.add(l)
                if isinstance(r, int):
                    out.add(r)
            case Branch(cond=c):
                out |= _cond_consts(c)
    return out


def simple_statements(prog: Program) -> list[tuple[str, Statement]]:
    """(label, stmt) pairs for assignments, reads and prints, label order."""
    return [
        (lbl, prog.stmt_of[lbl])
        for lbl in sorted(prog.stmt_of, key=label_key)
        if isinstance(prog.stmt_of[lbl], SIMPLE_STATEMENT_TYPES)
    ]


def fresh_labels(prog: Program, count: int) -> list[str]:
    """Deterministic unused labels G1, G2, ... given the program."""
    taken = set(prog.stmt_of)
    out: list[str] = []
    n = 1
    while len(out) < count:
        cand = f"G{n}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        n += 1
    return out


def _cond_has_abstc(cond: Cond) -> bool:
    match cond:
        case AbstCond():
            return True
        case Not(operand=x):
            return _cond_has_abstc(x)
        case And(left=l, right=r) | Or(left=l, right=r):
            return _cond_has_abstc(l) or _cond_has_abstc(r)
        case _:
            return False


def contains_abstc(prog: Program) -> bool:
    return any(
        isinstance(s, Branch) and _cond_has_abstc(s.cond) for s in prog.stmt_of.values()
    )


def contains_abstval(prog: Program) -> bool:
    return any(isinstance(s, PrintAbst) for s in prog.stmt_of.values())


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _atom_text(cond: Cond) -> str:
    # operand position of '!': composites need grouping
    if isinstance(cond, (And, Or)):
        return f"({render_cond(cond)})"
    return render_cond(cond)


def _and_operand(cond: Cond, right: bool) -> str:
    if isinstance(cond, Or) or (right and isinstance(cond, And)):
        return f"({render_cond(cond)})"
    return render_cond(cond)


def _or_operand(cond: Cond, right: bool) -> str:
    if right and isinstance(cond, Or):
        return f"({render_cond(cond)})"
    return render_cond(cond)


def render_cond(cond: Cond) -> str:
    match cond:
        case Lit(value=v):
            return str(v)
        case Cmp(lhs=lhs, op=op, rhs=rhs):
            return f"({lhs} {op} {rhs})"
        case AbstCond():
            return "abstc"
        case Not(operand=x):
            return "!" + _atom_text(x)
        case And(left=l, right=r):
            return f"{_and_operand(l, False)} && {_and_operand(r, True)}"
        case Or(left=l, right=r):
            return f"{_or_operand(l, False)} || {_or_operand(r, True)}"
    raise TypeError(f"not a condition: {cond!r}")


def render_statement(stmt: Statement) -> str:
    match stmt:
        case Skip():
            return "skip"
        case Stop():
            return "stop"
        case Assign(dst=d, left=l, op=op, right=r):
            return f"{d} = {l} {op} {r}"
        case ConstAssign(dst=d, value=v):
            return f"{d} = {v}"
        case Read(dst=d):
            return f"{d} = read"
        case PrintVar(name=n):
            return f"print {n}"
        case PrintConst(value=v):
            return f"print {v}"
        case PrintAbst():
            return "print abstval"
        case Branch(cond=c, on_true=t, on_false=f):
            return f"if ({render_cond(c)}) {t} {f}"
    raise TypeError(f"not a statement: {stmt!r}")


def render_program(prog: Program) -> str:
    """Canonical text: entry line first, remaining labels in natural order."""
    order = [prog.entry] + [l for l in sorted(prog.stmt_of, key=label_key) if l != prog.entry]
    lines = []
    for lbl in order:
        stmt = prog.stmt_of[lbl]
        line = f"{lbl}: {render_statement(stmt)}"
        if lbl in prog.next_of:
            line += f" -> {prog.next_of[lbl]}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def program_key(prog: Program) -> str:
    """Canonical text used for structural deduplication."""
    return render_program(prog)


# ---------------------------------------------------------------------------
# Condition parsing (recursive descent over a token list)
# ---------------------------------------------------------------------------

_COND_TOKEN = re.compile(r"\s*(\(|\)|!(?!=)|&&|\|\||==|!=|<=|>=|<|>|-?\d+|[a-z][a-z0-9_]*)")


def _tokenize_cond(text: str, line: int) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _COND_TOKEN.match(text, pos)
        if not m:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError(f"bad condition syntax near {rest!r}", line)
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _CondParser:
    def __init__(self, tokens: list[str], line: int, allow_abstract: bool):
        self.tokens = tokens
        self.i = 0
        self.line = line
        self.allow_abstract = allow_abstract

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of condition", self.line)
        self.i += 1
        return tok

    def parse(self) -> Cond:
        cond = self.parse_or()
        if self.peek() is not None:
            raise ParseError(f"trailing tokens in condition: {self.peek()!r}", self.line)
        return cond

    def parse_or(self) -> Cond:
        left = self.parse_and()
        while self.peek() == "||":
            self.take()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Cond:
        left = self.parse_unary()
        while self.peek() == "&&":
            self.take()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Cond:
        if self.peek() == "!":
            self.take()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Cond:
        tok = self.take()
        if tok == "(":
            inner = self.parse_or()
            if self.take() != ")":
                raise ParseError("expected ')' in condition", self.line)
            return inner
        if tok == "abstc":
            if not self.allow_abstract:
                raise ParseError("reserved token 'abstc' not allowed here", self.line)
            return ABSTC
        if _INT_RE.match(tok):
            value = int(tok)
            if value not in (0, 1):
                raise ParseError(f"bare condition literal must be 0 or 1, got {tok}", self.line)
            return Lit(value)
        if is_variable(tok):
            op = self.peek()
            if op not in CMP_OPS:
                raise ParseError(f"expected comparison operator after {tok!r}", self.line)
            self.take()
            rhs_tok = self.take()
            if _INT_RE.match(rhs_tok):
                return Cmp(tok, op, int(rhs_tok))
            if is_variable(rhs_tok):
                return Cmp(tok, op, rhs_tok)
            raise ParseError(f"bad comparison operand {rhs_tok!r}", self.line)
        raise ParseError(f"bad condition token {tok!r}", self.line)


def parse_cond(text: str, line: int = 0, allow_abstract: bool = False) -> Cond:
    return _CondParser(_tokenize_cond(text, line), line, allow_abstract).parse()


# ---------------------------------------------------------------------------
# Program parsing
# ---------------------------------------------------------------------------

_LINE_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)")


def _split_arrow(body: str, line: int) -> tuple[str, str | None]:
    if "->" in body:
        stmt_text, _, target = body.rpartition("->")
        target = target.strip()
        if not is_label(target):
            raise ParseError(f"bad successor label {target!r}", line)
        return stmt_text.strip(), target
    return body.strip(), None


def _parse_statement(text: str, line: int, allow_abstract: bool) -> Statement:
    if text == "skip":
        return Skip()
    if text == "stop":
        return Stop()
    if text.startswith("if"):
        rest = text[2:].strip()
        if not rest.startswith("("):
            raise ParseError("expected '(' after if", line)
        depth = 0
        end = -1
        for i, ch in enumerate(rest):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    end = i
                    break
        if end < 0:
            raise ParseError("unbalanced parentheses in branch condition", line)
        cond = parse_cond(rest[1:end], line, allow_abstract)
        targets = rest[end + 1:].split()
        if len(targets) != 2 or not all(is_label(t) for t in targets):
            raise ParseError("branch needs exactly two target labels", line)
        return Branch(cond, targets[0], targets[1])
    if text.startswith("print"):
        arg = text[5:].strip()
        if arg == "abstval":
            if not allow_abstract:
                raise ParseError("reserved token 'abstval' not allowed here", line)
            return PrintAbst()
        if _INT_RE.match(arg):
            return PrintConst(int(arg))
        if is_variable(arg):
            return PrintVar(arg)
        raise ParseError(f"bad print argument {arg!r}", line)
    if "=" in text:
        dst, _, rhs = text.partition("=")
        dst = dst.strip()
        rhs = rhs.strip()
        if not is_variable(dst):
            raise ParseError(f"bad assignment target {dst!r}", line)
        if rhs == "read":
            return Read(dst)
        if _INT_RE.match(rhs):
            return ConstAssign(dst, int(rhs))
        parts = rhs.split()
        if len(parts) == 3 and parts[1] in BINOPS:
            operands: list[int | str] = []
            for tok in (parts[0], parts[2]):
                if _INT_RE.match(tok):
                    operands.append(int(tok))
                elif is_variable(tok):
                    operands.append(tok)
                else:
                    raise ParseError(f"bad operand {tok!r}", line)
            return Assign(dst, operands[0], parts[1], operands[1])
        raise ParseError(f"bad assignment right-hand side {rhs!r}", line)
    raise ParseError(f"unrecognized statement {text!r}", line)


def parse_program(text: str, allow_abstract: bool = False) -> Program:
    """Parse canonical or hand-written program text.

    ``allow_abstract=True`` additionally admits the abstc/abstval markers
    and the reserved G<n> label namespace; it is meant for reparsing
    machine-generated templates, never for user input.
    """
    entries: list[tuple[str, Statement, str | None, int]] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        m = _LINE_RE.match(body)
        if not m:
            raise ParseError(f"expected 'LABEL: statement', got {body!r}", lineno)
        label, rest = m.group(1), m.group(2).strip()
        if not is_label(label):
            raise ParseError(f"bad label {label!r}", lineno)
        if not allow_abstract and RESERVED_LABEL.match(label):
            raise ParseError(f"label {label!r} is in the reserved G<n> namespace", lineno)
        if label in seen:
            raise DuplicateLabelError(f"line {lineno}: duplicate label {label!r}")
        seen.add(label)
        stmt_text, target = _split_arrow(rest, lineno)
        stmt = _parse_statement(stmt_text, lineno, allow_abstract)
        entries.append((label, stmt, target, lineno))
    if not entries:
        raise ParseError("empty program")

    stmt_of: dict[str, Statement] = {}
    next_of: dict[str, str] = {}
    for idx, (label, stmt, target, lineno) in enumerate(entries):
        stmt_of[label] = stmt
        if isinstance(stmt, (Branch, Stop)):
            continue  # '->' clause, if present, is ignored for these
        if target is None:
            if idx + 1 >= len(entries):
                raise ParseError(f"statement at {label!r} has no successor", lineno)
            target = entries[idx + 1][0]
        next_of[label] = target

    prog = Program(stmt_of, next_of, entries[0][0])
    validate_program(prog, allow_abstract=allow_abstract)
    return prog


def validate_program(prog: Program, allow_abstract: bool = False) -> None:
    """Check label closure and (in user mode) absence of abstract markers."""
    defined = set(prog.stmt_of)
    if prog.entry not in defined:
        raise UndefinedLabelError(f"entry label {prog.entry!r} is not defined")
    for label, stmt in prog.stmt_of.items():
        if isinstance(stmt, (Branch, Stop)):
            if label in prog.next_of:
                raise ProgramError(f"label {label!r} must not have a fall-through successor")
        if isinstance(stmt, Branch):
            for tgt in (stmt.on_true, stmt.on_false):
                if tgt not in defined:
                    raise UndefinedLabelError(f"branch at {label!r} targets undefined {tgt!r}")
            if not allow_abstract and _cond_has_abstc(stmt.cond):
                raise ProgramError(f"abstract condition marker at {label!r} in user program")
        elif isinstance(stmt, Stop):
            pass
        else:
            if label not in prog.next_of:
                raise UndefinedLabelError(f"statement at {label!r} has no successor")
            if isinstance(stmt, PrintAbst) and not allow_abstract:
                raise ProgramError(f"abstract value marker at {label!r} in user program")
        if label in prog.next_of and prog.next_of[label] not in defined:
            raise UndefinedLabelError(
                f"successor of {label!r} is undefined {prog.next_of[label]!r}"
            )
    for label in prog.next_of:
        if label not in defined:
            raise UndefinedLabelError(f"successor map mentions undefined label {label!r}")
