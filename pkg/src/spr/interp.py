"""Interpreter for plain programs and patch templates with abstract markers.

Execution of a template containing the abstract condition consults a plan:
a finite bit prefix plus an exhaustion policy. The policy ``preserve``
yields 0 once the prefix runs out, which makes every condition-schema
template behave exactly like the original program; ``force_one`` yields 1.
Each consulted bit is appended to the recorded sequence and the environment
at the consultation point is snapshotted. Short-circuit evaluation means a
branch whose concrete part already decides the outcome consults nothing.

In a template containing ``print abstval``, every print appends an
environment snapshot, so snapshots align index-for-index with the output.

Runs end in either success or bottom (input exhausted, out of fuel, or an
arithmetic fault); a bottom run always counts as a failing test.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from spr.lang import (
    ABSTC,
    AbstCond,
    And,
    Assign,
    BINOPS,
    Branch,
    Cmp,
    Cond,
    ConstAssign,
    Lit,
    Not,
    Or,
    PrintAbst,
    PrintConst,
    PrintVar,
    Program,
    ProgramError,
    Read,
    Skip,
    Statement,
    Stop,
    contains_abstval,
)

DEFAULT_FUEL = 1_000_000

PRESERVE = "preserve"
FORCE_ONE = "force_one"

INPUT_EXHAUSTED = "input-exhausted"
FUEL_EXHAUSTED = "fuel-exhausted"
ARITHMETIC_FAULT = "arithmetic-fault"


class _AbstVal:
    """Output token printed by the abstract value marker."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "abstval"


ABSTVAL = _AbstVal()

Env = dict[str, int]


@dataclass(frozen=True)
class AbstPlan:
    """Branch-direction plan: finite prefix plus exhaustion policy."""

    prefix: tuple[int, ...] = ()
    policy: str = PRESERVE

    def __post_init__(self):
        if self.policy not in (PRESERVE, FORCE_ONE):
            raise ValueError(f"unknown plan policy {self.policy!r}")


EMPTY_PLAN = AbstPlan()
ALL_ONES_PLAN = AbstPlan((), FORCE_ONE)


@dataclass(frozen=True)
class ExecOutcome:
    """Result of a run. ``fault`` is None on success.

    Bottom outcomes keep the partial output, recorded bits and snapshots
    accumulated before the fault; the staged search uses the partial
    recorded bits to aim its next trial.
    """

    output: tuple
    recorded: tuple[int, ...]
    envlog: tuple[Env, ...]
    fault: str | None = None

    @property
    def ok(self) -> bool:
        return self.fault is None


@dataclass(frozen=True)
class MachineState:
    """One interpreter configuration.

    ``pc`` is None once the run has stopped or bottomed out; ``fault``
    distinguishes the two.
    """

    pc: str | None
    env: Env
    input: tuple[int, ...]
    output: tuple
    plan: AbstPlan
    recorded: tuple[int, ...]
    envlog: tuple[Env, ...]
    fault: str | None = None


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # keeps pytest from collecting this when imported

    name: str
    input: tuple[int, ...]
    expected: tuple[int, ...]


class _Run:
    __slots__ = (
        "pc", "env", "input", "in_idx", "output", "prefix", "plan_idx",
        "policy", "recorded", "envlog", "abstval_mode", "fault",
    )

    def __init__(self, pc, env, input_vals, plan: AbstPlan, abstval_mode: bool):
        self.pc = pc
        self.env = env
        self.input = input_vals
        self.in_idx = 0
        self.output = []
        self.prefix = plan.prefix
        self.plan_idx = 0
        self.policy = plan.policy
        self.recorded = []
        self.envlog = []
        self.abstval_mode = abstval_mode
        self.fault = None


def _consult(run: _Run) -> int:
    if run.plan_idx < len(run.prefix):
        bit = run.prefix[run.plan_idx]
        run.plan_idx += 1
    else:
        bit = 0 if run.policy == PRESERVE else 1
    run.recorded.append(bit)
    run.envlog.append(dict(run.env))
    return bit


def _atom_value(env: Env, atom) -> int:
    return atom if isinstance(atom, int) else env.get(atom, 0)


def eval_cond(env: Env, cond: Cond) -> int:
    """Evaluate a concrete condition; unset variables read as 0."""
    match cond:
        case Lit(value=v):
            return v
        case Cmp(lhs=lhs, op=op, rhs=rhs):
            return BINOPS[op](env.get(lhs, 0), _atom_value(env, rhs))
        case Not(operand=x):
            return 1 - eval_cond(env, x)
        case And(left=l, right=r):
            return eval_cond(env, r) if eval_cond(env, l) else 0
        case Or(left=l, right=r):
            return 1 if eval_cond(env, l) else eval_cond(env, r)
        case AbstCond():
            raise ProgramError("abstract condition marker in concrete evaluation")
    raise TypeError(f"not a condition: {cond!r}")


def _eval_cond_run(run: _Run, cond: Cond) -> int:
    # Same shape as eval_cond, but abstract markers consult the plan.
    # Short-circuiting is what keeps unconsulted branches unrecorded.
    match cond:
        case Lit(value=v):
            return v
        case Cmp(lhs=lhs, op=op, rhs=rhs):
            env = run.env
            return BINOPS[op](env.get(lhs, 0), _atom_value(env, rhs))
        case Not(operand=x):
            return 1 - _eval_cond_run(run, x)
        case And(left=l, right=r):
            return _eval_cond_run(run, r) if _eval_cond_run(run, l) else 0
        case Or(left=l, right=r):
            return 1 if _eval_cond_run(run, l) else _eval_cond_run(run, r)
        case AbstCond():
            return _consult(run)
    raise TypeError(f"not a condition: {cond!r}")


def _transition(run: _Run, prog: Program) -> None:
    label = run.pc
    stmt = prog.stmt_of[label]
    match stmt:
        case Assign(dst=d, left=l, op=op, right=r):
            env = run.env
            try:
                env[d] = BINOPS[op](_atom_value(env, l), _atom_value(env, r))
            except ZeroDivisionError:
                run.fault = ARITHMETIC_FAULT
                run.pc = None
                return
            run.pc = prog.next_of[label]
        case ConstAssign(dst=d, value=v):
            run.env[d] = v
            run.pc = prog.next_of[label]
        case Read(dst=d):
            if run.in_idx >= len(run.input):
                run.fault = INPUT_EXHAUSTED
                run.pc = None
                return
            run.env[d] = run.input[run.in_idx]
            run.in_idx += 1
            run.pc = prog.next_of[label]
        case PrintVar(name=n):
            run.output.append(run.env.get(n, 0))
            if run.abstval_mode:
                run.envlog.append(dict(run.env))
            run.pc = prog.next_of[label]
        case PrintConst(value=v):
            run.output.append(v)
            if run.abstval_mode:
                run.envlog.append(dict(run.env))
            run.pc = prog.next_of[label]
        case PrintAbst():
            run.output.append(ABSTVAL)
            run.envlog.append(dict(run.env))
            run.pc = prog.next_of[label]
        case Branch(cond=c, on_true=t, on_false=f):
            run.pc = t if _eval_cond_run(run, c) else f
        case Skip():
            run.pc = prog.next_of[label]
        case Stop():
            run.pc = None
        case _:
            raise TypeError(f"not a statement: {stmt!r}")


def _remaining_plan(run: _Run) -> AbstPlan:
    return AbstPlan(run.prefix[run.plan_idx:], run.policy)


def initial_state(prog: Program, input_vals, plan: AbstPlan = EMPTY_PLAN) -> MachineState:
    return MachineState(prog.entry, {}, tuple(input_vals), (), plan, (), ())


def step(state: MachineState, prog: Program) -> MachineState:
    """One transition. The pc must name a statement (not a finished run)."""
    if state.pc is None:
        raise ValueError("cannot step a finished run")
    if state.pc not in prog.stmt_of:
        raise ProgramError(f"pc points at undefined label {state.pc!r}")
    run = _Run(state.pc, dict(state.env), state.input, state.plan, contains_abstval(prog))
    run.output = list(state.output)
    run.recorded = list(state.recorded)
    run.envlog = [dict(e) for e in state.envlog]
    _transition(run, prog)
    return MachineState(
        run.pc,
        run.env,
        tuple(run.input[run.in_idx:]),
        tuple(run.output),
        _remaining_plan(run),
        tuple(run.recorded),
        tuple(run.envlog),
        run.fault,
    )


def execute(
    prog: Program,
    input_vals,
    plan: AbstPlan = EMPTY_PLAN,
    fuel: int = DEFAULT_FUEL,
    trace=None,
) -> ExecOutcome:
    """Run to completion from the entry label with an empty environment.

    ``trace(label, n)`` is called before executing the n-th statement
    (n starts at 1); instrumented localization hangs off this hook.
    """
    run = _Run(prog.entry, {}, tuple(input_vals), plan, contains_abstval(prog))
    steps = 0
    if trace is None:
        while run.pc is not None:
            if steps >= fuel:
                run.fault = FUEL_EXHAUSTED
                break
            steps += 1
            _transition(run, prog)
    else:
        while run.pc is not None:
            if steps >= fuel:
                run.fault = FUEL_EXHAUSTED
                break
            steps += 1
            trace(run.pc, steps)
            _transition(run, prog)
    return ExecOutcome(tuple(run.output), tuple(run.recorded), tuple(run.envlog), run.fault)


def run_case(prog: Program, case: TestCase, fuel: int = DEFAULT_FUEL) -> bool:
    """True when the program reproduces the expected output exactly."""
    out = execute(prog, case.input, EMPTY_PLAN, fuel)
    return out.ok and out.output == case.expected


def test_all(prog: Program, neg, pos, fuel: int = DEFAULT_FUEL) -> bool:
    """Validate against failing cases first, then passing ones."""
    for case in neg:
        if not run_case(prog, case, fuel):
            return False
    for case in pos:
        if not run_case(prog, case, fuel):
            return False
    return True


test_all.__test__ = False  # keeps pytest from collecting this when imported


# ---------------------------------------------------------------------------
# Test-case files: two lines, "in: <ints>" and "out: <ints>"
# ---------------------------------------------------------------------------

def parse_test_case(text: str, name: str = "<case>") -> TestCase:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != 2 or not lines[0].startswith("in:") or not lines[1].startswith("out:"):
        raise ValueError(f"{name}: expected an 'in:' line then an 'out:' line")

    def ints(s: str) -> tuple[int, ...]:
        return tuple(int(tok) for tok in s.split())

    try:
        return TestCase(name, ints(lines[0][3:]), ints(lines[1][4:]))
    except ValueError as err:
        raise ValueError(f"{name}: bad integer ({err})") from None


def load_test_file(path) -> TestCase:
    with open(path, encoding="utf-8") as fh:
        return parse_test_case(fh.read(), name=os.path.basename(str(path)))


def load_test_dir(path) -> list[TestCase]:
    """All *.txt cases in a directory, sorted by file name."""
    if not os.path.isdir(path):
        return []
    return [
        load_test_file(os.path.join(path, fn))
        for fn in sorted(os.listdir(path))
        if fn.endswith(".txt")
    ]
