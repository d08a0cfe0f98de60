"""Boolean rule files: parsing, evaluation and compilation to logical matrices.

Rule-file layout::

    # comment
    states: x1, x2, x3
    inputs: u
    subsystems: 2
    [subsystem 1]
    x1 = (u ^ x1) & (x2 <-> x3)
    ...

Operators, tightest first: ``!`` (not), ``&`` (and), ``|`` (or), ``^`` (xor),
``->`` (implies, right-associative), ``<->`` (equivalence). ``0``/``1`` are
constants.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .logic import LogicalMatrix

MAX_STRUCTURE_VARS = 20
DEFAULT_BIT_BUDGET = 26
_CHUNK = 1 << 20


class RuleError(ValueError):
    """A rule text that cannot be parsed or does not validate."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


# --- AST -----------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of and, or, xor, imp, iff
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Not, BinOp]

_BIN_FUNCS = {
    "and": lambda a, b: a & b,
    "or": lambda a, b: a | b,
    "xor": lambda a, b: a ^ b,
    "imp": lambda a, b: (1 - a) | b,
    "iff": lambda a, b: 1 - (a ^ b),
}
_SYMBOLS = {"and": "&", "or": "|", "xor": "^", "imp": "->", "iff": "<->"}


def variables(expr: Expr) -> list[str]:
    """Free variables in order of first appearance."""
    seen: dict[str, None] = {}
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Var):
            seen.setdefault(e.name)
        elif isinstance(e, Not):
            stack.append(e.arg)
        elif isinstance(e, BinOp):
            stack.append(e.right)
            stack.append(e.left)
    return list(seen)


def to_text(expr: Expr) -> str:
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Not):
        return f"!{to_text(expr.arg)}"
    return f"({to_text(expr.left)} {_SYMBOLS[expr.op]} {to_text(expr.right)})"


def evaluate(expr: Expr, assignment: Mapping[str, int]) -> int:
    """Evaluate ``expr`` on a 0/1 assignment."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return 1 if assignment[expr.name] else 0
        except KeyError:
            raise KeyError(f"variable {expr.name!r} missing from assignment") from None
    if isinstance(expr, Not):
        return 1 - evaluate(expr.arg, assignment)
    return _BIN_FUNCS[expr.op](evaluate(expr.left, assignment), evaluate(expr.right, assignment))


def evaluate_array(expr: Expr, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Vectorised :func:`evaluate` over uint8 arrays of equal length."""
    if isinstance(expr, Const):
        size = len(next(iter(env.values()))) if env else 1
        return np.full(size, expr.value, dtype=np.uint8)
    if isinstance(expr, Var):
        return env[expr.name]
    if isinstance(expr, Not):
        return 1 - evaluate_array(expr.arg, env)
    return _BIN_FUNCS[expr.op](evaluate_array(expr.left, env), evaluate_array(expr.right, env))


# --- parser --------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<const>[01])(?![0-9])"
                       r"|(?P<op><->|->|[!&|^()]))")


def _tokenize(text: str, line: int | None, offset: int):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise RuleError(f"unexpected character {text[pos]!r}", line, offset + pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), offset + start + 1))
        pos = m.end()
    tokens.append(("end", "", offset + len(text) + 1))
    return tokens


class _Parser:
    # binary levels from loosest to tightest
    _LEVELS = [("<->", "iff"), ("->", "imp"), ("^", "xor"), ("|", "or"), ("&", "and")]

    def __init__(self, tokens, line):
        self.tokens = tokens
        self.i = 0
        self.line = line

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, tok, what):
        shown = "end of input" if tok[0] == "end" else repr(tok[1])
        raise RuleError(f"{what}, found {shown}", self.line, tok[2])

    def parse(self) -> Expr:
        expr = self.binary(0)
        tok = self.peek()
        if tok[0] != "end":
            self.error(tok, "expected operator")
        return expr

    def binary(self, level: int) -> Expr:
        if level == len(self._LEVELS):
            return self.unary()
        symbol, op = self._LEVELS[level]
        left = self.binary(level + 1)
        if op == "imp":
            if self.peek()[1] == symbol and self.peek()[0] == "op":
                self.take()
                return BinOp(op, left, self.binary(level))
            return left
        while self.peek()[0] == "op" and self.peek()[1] == symbol:
            self.take()
            left = BinOp(op, left, self.binary(level + 1))
        return left

    def unary(self) -> Expr:
        tok = self.take()
        kind, text, _ = tok
        if kind == "op" and text == "!":
            return Not(self.unary())
        if kind == "op" and text == "(":
            inner = self.binary(0)
            close = self.take()
            if close[1] != ")":
                self.error(close, "expected ')'")
            return inner
        if kind == "ident":
            return Var(text)
        if kind == "const":
            return Const(int(text))
        self.error(tok, "expected operand")


def parse_expr(text: str, *, line: int | None = None, offset: int = 0) -> Expr:
    """Parse one Boolean expression; ``offset`` shifts reported columns."""
    return _Parser(_tokenize(text, line, offset), line).parse()


@dataclass
class RuleSet:
    """Parsed rule file: per-subsystem update rules over declared names."""

    states: list[str]
    inputs: list[str]
    subsystems: list[dict[str, Expr]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def m(self) -> int:
        return len(self.inputs)

    @property
    def z(self) -> int:
        return len(self.subsystems)

    def rules(self, subsystem: int = 1) -> dict[str, Expr]:
        return self.subsystems[subsystem - 1]


_HEADER_RE = re.compile(r"^\s*(states|inputs|subsystems)\s*:(.*)$")
_BLOCK_RE = re.compile(r"^\s*\[\s*subsystem\s+(\d+)\s*\]\s*$")
_RULE_RE = re.compile(r"^(\s*)([A-Za-z_][A-Za-z0-9_]*)(\s*)=(?!=)")


def _name_list(body: str, line: int) -> list[str]:
    names = [s.strip() for s in body.split(",") if s.strip()]
    for name in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise RuleError(f"invalid name {name!r}", line)
    if len(set(names)) != len(names):
        raise RuleError("duplicate name in declaration", line)
    return names


def parse_rules(text: str) -> RuleSet:
    """Parse a rule file.

    Without a ``states:`` header the states are the left-hand sides in order
    of definition, and any other identifier becomes an input (in order of
    first use) unless ``inputs:`` is given. Without ``[subsystem k]`` blocks
    all rules form a single subsystem.
    """
    states: list[str] | None = None
    inputs: list[str] | None = None
    z_declared: int | None = None
    blocks: dict[int, dict[str, tuple[Expr, int]]] = {}
    order: list[int] = []
    current: int | None = None
    refs: list[tuple[str, int, int]] = []  # (name, line, column) for later checks

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0]
        if not stripped.strip():
            continue
        m = _HEADER_RE.match(stripped)
        if m:
            key, body = m.group(1), m.group(2)
            if key == "states":
                states = _name_list(body, lineno)
            elif key == "inputs":
                inputs = _name_list(body, lineno)
            else:
                try:
                    z_declared = int(body.strip())
                except ValueError:
                    raise RuleError(f"subsystems must be an integer, got {body.strip()!r}", lineno) from None
                if z_declared < 1:
                    raise RuleError("subsystems must be positive", lineno)
            continue
        m = _BLOCK_RE.match(stripped)
        if m:
            current = int(m.group(1))
            if current in blocks:
                raise RuleError(f"subsystem {current} defined twice", lineno)
            blocks[current] = {}
            order.append(current)
            continue
        m = _RULE_RE.match(stripped)
        if not m:
            raise RuleError("expected 'name = expression', a header or a [subsystem k] line", lineno, 1)
        if current is None:
            current = 1
            blocks[1] = {}
            order.append(1)
        name = m.group(2)
        if name in blocks[current]:
            raise RuleError(f"duplicate definition of {name!r}", lineno, len(m.group(1)) + 1)
        expr = parse_expr(stripped[m.end():], line=lineno, offset=m.end())
        blocks[current][name] = (expr, lineno)
        refs.append((name, lineno, len(m.group(1)) + 1))

    if not blocks:
        raise RuleError("no rules found")
    if states is None:
        seen: dict[str, None] = {}
        for k in order:
            for name in blocks[k]:
                seen.setdefault(name)
        states = list(seen)
    if not states:
        raise RuleError("empty states list")
    if inputs is None:
        extra: dict[str, None] = {}
        for k in order:
            for expr, _ in blocks[k].values():
                for v in variables(expr):
                    if v not in states:
                        extra.setdefault(v)
        inputs = list(extra)
    overlap = set(states) & set(inputs)
    if overlap:
        raise RuleError(f"names declared both as state and input: {sorted(overlap)}")

    expected = list(range(1, len(blocks) + 1))
    if sorted(blocks) != expected:
        raise RuleError(f"subsystem blocks must be numbered 1..{len(blocks)}, got {sorted(blocks)}")
    if z_declared is not None and z_declared != len(blocks):
        raise RuleError(f"header declares {z_declared} subsystems but {len(blocks)} blocks found")

    known = set(states) | set(inputs)
    state_set = set(states)
    subsystems = []
    for k in expected:
        block = blocks[k]
        for name, (expr, lineno) in block.items():
            if name not in state_set:
                raise RuleError(f"rule for undeclared state {name!r}", lineno)
            for v in variables(expr):
                if v not in known:
                    raise RuleError(f"undeclared identifier {v!r}", lineno)
        missing = [s for s in states if s not in block]
        if missing:
            raise RuleError(f"subsystem {k} has no rule for {', '.join(missing)}")
        subsystems.append({s: block[s][0] for s in states})
    return RuleSet(states, inputs, subsystems)


# --- compilation ---------------------------------------------------------

@dataclass(frozen=True)
class StructureMatrix:
    matrix: LogicalMatrix
    var_order: tuple[str, ...]


def _assignment_bits(n_vars: int, start: int, stop: int) -> list[np.ndarray]:
    """Bits of assignments ``start..stop-1`` (0-based delta columns).

    Variable 0 is most significant and bit value 1 corresponds to delta_2^1,
    so column ``c`` holds the complement of the binary digits of ``c``.
    """
    cols = np.arange(start, stop, dtype=np.int64)
    return [(1 - ((cols >> (n_vars - 1 - p)) & 1)).astype(np.uint8) for p in range(n_vars)]


def structure_matrix(expr: Expr, var_order: Sequence[str]) -> StructureMatrix:
    """Structure matrix of ``expr`` with respect to ``var_order``."""
    free = set(variables(expr))
    order = tuple(var_order)
    if len(set(order)) != len(order) or set(order) != free:
        raise ValueError(f"var_order {list(order)} does not match the free variables {sorted(free)}")
    k = len(order)
    if k > MAX_STRUCTURE_VARS:
        raise ValueError(f"{k} variables exceed the structure-matrix limit of {MAX_STRUCTURE_VARS}")
    size = 1 << k
    env = dict(zip(order, _assignment_bits(k, 0, size)))
    values = np.broadcast_to(evaluate_array(expr, env), (size,))
    return StructureMatrix(LogicalMatrix(2, 2 - values.astype(np.int64)), order)


def bit_budget() -> int:
    raw = os.environ.get("SBCN_OPT_BITBUDGET")
    if raw is None:
        return DEFAULT_BIT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"SBCN_OPT_BITBUDGET must be an integer, got {raw!r}") from None


def assemble_network_matrix(node_exprs: Sequence[Expr], state_names: Sequence[str],
                            input_names: Sequence[str] = ()) -> LogicalMatrix:
    """Network transition matrix ``L`` in ``L_{N x MN}``.

    Column ``(k-1)N + i`` is the successor of ``delta_N^i`` under input
    ``delta_M^k``; the joint assignment order is inputs first, then states.
    """
    n, m = len(state_names), len(input_names)
    if len(node_exprs) != n:
        raise ValueError(f"{len(node_exprs)} expressions for {n} states")
    budget = bit_budget()
    if n + m > budget:
        raise ValueError(f"n + m = {n + m} exceeds the bit budget {budget} (SBCN_OPT_BITBUDGET)")
    names = list(input_names) + list(state_names)
    known = set(names)
    for expr in node_exprs:
        unknown = set(variables(expr)) - known
        if unknown:
            raise ValueError(f"unknown variables {sorted(unknown)}")
    n_vars = n + m
    total = 1 << n_vars
    N = 1 << n
    out = np.empty(total, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        env = dict(zip(names, _assignment_bits(n_vars, start, stop)))
        value = np.zeros(stop - start, dtype=np.int64)
        for i, expr in enumerate(node_exprs):
            bit = evaluate_array(expr, env)
            if bit.ndim == 0 or bit.size != stop - start:
                bit = np.broadcast_to(bit, (stop - start,))
            value |= bit.astype(np.int64) << (n - 1 - i)
        out[start:stop] = N - value
    return LogicalMatrix(N, out)


def compile_rules(rules: RuleSet) -> list[LogicalMatrix]:
    """One network transition matrix per subsystem."""
    return [assemble_network_matrix([block[s] for s in rules.states], rules.states, rules.inputs)
            for block in rules.subsystems]
