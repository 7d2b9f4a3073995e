"""Shared fixtures and independent oracles used across the test suite."""

from __future__ import annotations

import random

from spr.lang import (
    Assign,
    Branch,
    Cmp,
    ConstAssign,
    PrintConst,
    PrintVar,
    Program,
    Read,
    Stop,
    parse_program,
    render_program,
    vars_of,
)

# Five-line buggy-branch fixture: prints 1 exactly for input 5, but the
# intended behavior accepts 3 as well.  Its validation suite is one negative
# case (3 -> [1]) and one positive case (7 -> [0]).
BRANCH_FIXTURE = """\
L0: x = read -> L1
L1: if ((x == 5)) L2 L3
L2: print 1 -> L4
L3: print 0 -> L4
L4: stop
"""

STRAIGHT_LINE_FIXTURE = """\
L0: x = read -> L1
L1: print x -> L2
L2: stop
"""


def branch_fixture() -> Program:
    return parse_program(BRANCH_FIXTURE)


def straight_line_fixture() -> Program:
    return parse_program(STRAIGHT_LINE_FIXTURE)


# ---------------------------------------------------------------------------
# Random tiny programs with one seeded defect
# ---------------------------------------------------------------------------
#
# Shapes are loop free: a handful of reads and assignments, at most one
# branch over two print arms, then stop.  Small enough that a brute-force
# patch enumerator stays exact and fast.

_TINY_CONSTS = (0, 1, 2)


def _random_linear_part(rng: random.Random, variables: list[str], n: int) -> list:
    stmts = []
    for _ in range(n):
        kind = rng.randrange(4)
        dst = rng.choice(variables)
        if kind == 0:
            stmts.append(Read(dst))
        elif kind == 1:
            stmts.append(ConstAssign(dst, rng.choice(_TINY_CONSTS)))
        elif kind == 2:
            op = rng.choice(("+", "-", "*", "=="))
            stmts.append(Assign(dst, rng.choice(variables), op, rng.choice(variables)))
        else:
            stmts.append(PrintVar(dst) if rng.random() < 0.7 else PrintConst(rng.choice(_TINY_CONSTS)))
    return stmts


def generate_tiny_program(rng: random.Random) -> Program:
    """A well-formed reference program with <= 6 statements, <= 2 variables."""
    variables = ["x"] if rng.random() < 0.4 else ["x", "y"]
    prefix = [Read(v) for v in variables]
    body = _random_linear_part(rng, variables, rng.randrange(1, 3))
    stmts = prefix + body
    with_branch = rng.random() < 0.6
    lines: list[str] = []
    n = 0

    def emit(stmt, nxt):
        nonlocal n
        from spr.lang import render_statement

        suffix = f" -> {nxt}" if nxt else ""
        lines.append(f"L{n}: {render_statement(stmt)}{suffix}")
        n += 1

    for stmt in stmts:
        emit(stmt, f"L{n + 1}")
    if with_branch:
        cond_var = rng.choice(variables)
        cond = Cmp(cond_var, "==", rng.choice(_TINY_CONSTS))
        base = n
        lines.append(f"L{base}: if ({_cond_text(cond)}) L{base + 1} L{base + 2}")
        n += 1
        emit(_random_print(rng, variables), f"L{base + 3}")
        emit(_random_print(rng, variables), f"L{base + 3}")
        emit(Stop(), None)
    else:
        emit(_random_print(rng, variables), f"L{n + 1}")
        emit(Stop(), None)
    return parse_program("\n".join(lines) + "\n")


def _random_print(rng: random.Random, variables: list[str]):
    if rng.random() < 0.7:
        return PrintVar(rng.choice(variables))
    return PrintConst(rng.choice(_TINY_CONSTS))


def _cond_text(cond: Cmp) -> str:
    return f"({cond.lhs} {cond.op} {cond.rhs})"


def mutate_program(prog: Program, rng: random.Random) -> Program | None:
    """One seeded defect: perturb a constant, a variable, or a branch test."""
    labels = list(prog.stmt_of)
    rng.shuffle(labels)
    variables = sorted(vars_of(prog))
    for label in labels:
        stmt = prog.stmt_of[label]
        new = None
        if isinstance(stmt, ConstAssign):
            new = ConstAssign(stmt.dst, rng.choice([c for c in _TINY_CONSTS if c != stmt.value]))
        elif isinstance(stmt, PrintConst):
            new = PrintConst(rng.choice([c for c in _TINY_CONSTS if c != stmt.value]))
        elif isinstance(stmt, PrintVar) and len(variables) > 1:
            others = [v for v in variables if v != stmt.name]
            new = PrintVar(rng.choice(others))
        elif isinstance(stmt, Assign):
            choice = rng.randrange(3)
            if choice == 0:
                new = Assign(stmt.dst, stmt.left, rng.choice([o for o in ("+", "-", "*", "==") if o != stmt.op]), stmt.right)
            elif choice == 1 and len(variables) > 1:
                others = [v for v in variables if v != stmt.left]
                new = Assign(stmt.dst, rng.choice(others), stmt.op, stmt.right)
            elif len(variables) > 1:
                others = [v for v in variables if v != stmt.right]
                new = Assign(stmt.dst, stmt.left, stmt.op, rng.choice(others))
        elif isinstance(stmt, Branch) and isinstance(stmt.cond, Cmp) and isinstance(stmt.cond.rhs, int):
            new_rhs = rng.choice([c for c in _TINY_CONSTS if c != stmt.cond.rhs])
            new = Branch(Cmp(stmt.cond.lhs, stmt.cond.op, new_rhs), stmt.on_true, stmt.on_false)
        if new is not None and new != stmt:
            stmt_of = dict(prog.stmt_of)
            stmt_of[label] = new
            return Program(stmt_of, dict(prog.next_of), prog.entry)
    return None


def roundtrip(prog: Program) -> Program:
    return parse_program(render_program(prog), allow_abstract=True)


# ---------------------------------------------------------------------------
# Brute-force repair oracle
# ---------------------------------------------------------------------------
#
# Enumerates the same template space as the engine but replaces the staged
# search with exhaustive validation: every condition both ways over the
# variable/value pairs observed when control reaches the target, every
# variable, constant, and expected output for an abstract value.  Exact for
# the loop-free tiny programs above, where the target is reached at most once
# per run and so the observed pairs cover the whole reachable condition space.

def arrival_envs(prog: Program, inputs, target: str, max_steps: int = 500):
    from spr.interp import initial_state, step

    snaps = []
    for vec in inputs:
        state = initial_state(prog, vec)
        for _ in range(max_steps):
            if state.pc is None:
                break
            if state.pc == target:
                snaps.append(dict(state.env))
            state = step(state, prog)
    return snaps


def brute_force_repair_exists(prog: Program, neg, pos, cfg=None, fuel: int = 10_000) -> bool:
    from spr.interp import test_all
    from spr.lang import Cmp, Not, consts_of, render_cond
    from spr.localize import localize
    from spr.synth import substitute_condition, substitute_value
    from spr.transform import SpaceConfig, generate_space

    cfg = cfg or SpaceConfig()
    cases = list(neg) + list(pos)
    ranked = localize(prog, list(neg), list(pos), limit=cfg.loc_limit, fuel=fuel)
    for template in generate_space(prog, ranked, cfg):
        tp = template.program
        if template.kind == "plain":
            if test_all(tp, neg, pos, fuel):
                return True
        elif template.kind == "abstval":
            pool = sorted(vars_of(tp))
            pool += sorted(consts_of(tp) | {v for c in cases for v in c.expected})
            if any(test_all(substitute_value(tp, v), neg, pos, fuel) for v in pool):
                return True
        else:
            seen: set[str] = set()
            for env in arrival_envs(prog, [c.input for c in cases], template.target):
                for var in sorted(env):
                    for cond in (Cmp(var, "==", env[var]), Not(Cmp(var, "==", env[var]))):
                        key = render_cond(cond)
                        if key in seen:
                            continue
                        seen.add(key)
                        if test_all(substitute_condition(tp, cond), neg, pos, fuel):
                            return True
    return False
