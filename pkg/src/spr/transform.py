"""Patch template generation.

Each schema edits one target label and yields a well-formed program that,
run under the empty preserve plan, behaves exactly like the original.
Condition schemas plant the abstract condition marker; replacement and
copy-insert schemas may plant the abstract value marker inside a print.
The full space interleaves schemas over the localization ranking into a
single deterministic priority order.
"""

from __future__ import annotations

from dataclasses import dataclass

from spr.lang import (
    ABSTC,
    And,
    Assign,
    Branch,
    ConstAssign,
    Lit,
    Not,
    Or,
    PrintAbst,
    PrintConst,
    PrintVar,
    Program,
    Read,
    Statement,
    Stop,
    consts_of,
    contains_abstval,
    fresh_labels,
    label_key,
    render_program,
    render_statement,
    simple_statements,
    vars_of,
)

EXT_REP_OPS = ("+", "-", "*", "==", "!=")

TIER_BRANCH_COND = 1
TIER_CONTROL = 2
TIER_GUARD = 3
TIER_ABSTVAL = 4
TIER_INIT = 5
TIER_REP = 6
TIER_CPREP = 7


@dataclass(frozen=True)
class SpaceConfig:
    """Search-space knobs; the defaults give the baseline space."""

    loc_limit: int = 200
    ext_cond: bool = False
    ext_rep: bool = False
    goto_control: bool = False

    def __post_init__(self):
        if self.loc_limit < 1:
            raise ValueError("loc_limit must be positive")


@dataclass(frozen=True)
class PatchTemplate:
    program: Program
    schema: str
    target: str
    tier: int
    provenance: str

    @property
    def kind(self) -> str:
        """What the template still needs: a condition, a value, or nothing."""
        if self.schema in ("tighten", "loosen", "control", "guard"):
            return "abstc"
        if contains_abstval(self.program):
            return "abstval"
        return "plain"


def _maps(prog: Program):
    return dict(prog.stmt_of), dict(prog.next_of)


def tighten(prog: Program, label: str) -> list[PatchTemplate]:
    """Add an and-not-switch to the branch condition at the target."""
    stmt = prog.stmt_of[label]
    if not isinstance(stmt, Branch):
        return []
    stmt_of, next_of = _maps(prog)
    stmt_of[label] = Branch(And(stmt.cond, Not(ABSTC)), stmt.on_true, stmt.on_false)
    return [PatchTemplate(
        Program(stmt_of, next_of, prog.entry),
        "tighten", label, TIER_BRANCH_COND,
        f"tighten the branch condition at {label}",
    )]


def loosen(prog: Program, label: str) -> list[PatchTemplate]:
    """Add an or-switch to the branch condition at the target."""
    stmt = prog.stmt_of[label]
    if not isinstance(stmt, Branch):
        return []
    stmt_of, next_of = _maps(prog)
    stmt_of[label] = Branch(Or(stmt.cond, ABSTC), stmt.on_true, stmt.on_false)
    return [PatchTemplate(
        Program(stmt_of, next_of, prog.entry),
        "loosen", label, TIER_BRANCH_COND,
        f"loosen the branch condition at {label}",
    )]


def _relocated(prog: Program, label: str, moved: str):
    """Maps with the target statement moved to a fresh label."""
    stmt_of, next_of = _maps(prog)
    stmt_of[moved] = stmt_of[label]
    if label in next_of:
        next_of[moved] = next_of.pop(label)
    return stmt_of, next_of


def control(prog: Program, label: str, goto_control: bool = False) -> list[PatchTemplate]:
    """Replace the target with a switched jump, falling through otherwise.

    The base template jumps to an inserted stop; with goto_control on,
    one extra template per original label jumps there instead.
    """
    out = []
    moved, stop_lbl = fresh_labels(prog, 2)
    stmt_of, next_of = _relocated(prog, label, moved)
    stmt_of[label] = Branch(Or(Lit(0), ABSTC), stop_lbl, moved)
    stmt_of[stop_lbl] = Stop()
    out.append(PatchTemplate(
        Program(stmt_of, next_of, prog.entry),
        "control", label, TIER_CONTROL,
        f"stop early at {label} when the switch fires",
    ))
    if goto_control:
        for dest in sorted(prog.stmt_of, key=label_key):
            stmt_of, next_of = _relocated(prog, label, moved)
            stmt_of[label] = Branch(Or(Lit(0), ABSTC), dest, moved)
            out.append(PatchTemplate(
                Program(stmt_of, next_of, prog.entry),
                "control", label, TIER_CONTROL,
                f"jump to {dest} from {label} when the switch fires",
            ))
    return out


def guard(prog: Program, label: str) -> list[PatchTemplate]:
    """Make the target statement skippable behind a switched branch."""
    stmt = prog.stmt_of[label]
    if isinstance(stmt, (Branch, Stop)):
        return []
    succ = prog.next_of[label]
    (moved,) = fresh_labels(prog, 1)
    stmt_of, next_of = _relocated(prog, label, moved)
    stmt_of[label] = Branch(And(Lit(1), Not(ABSTC)), moved, succ)
    return [PatchTemplate(
        Program(stmt_of, next_of, prog.entry),
        "guard", label, TIER_GUARD,
        f"skip the statement at {label} when the switch fires",
    )]


def _insert_before(prog: Program, label: str, stmt: Statement) -> Program:
    (moved,) = fresh_labels(prog, 1)
    stmt_of, next_of = _relocated(prog, label, moved)
    stmt_of[label] = stmt
    next_of[label] = moved
    return Program(stmt_of, next_of, prog.entry)


def init(prog: Program, label: str) -> list[PatchTemplate]:
    """Insert a zero-initialization for each variable the target touches."""
    out = []
    for v in sorted(vars_of(prog.stmt_of[label])):
        out.append(PatchTemplate(
            _insert_before(prog, label, ConstAssign(v, 0)),
            "init", label, TIER_INIT,
            f"insert {v} = 0 before {label}",
        ))
    return out


def rep_variants(stmt: Statement, prog: Program, ext_rep: bool = False) -> list[Statement]:
    """Single-slot rewrites of one simple statement.

    Prints collapse to the abstract-value print. With ext_rep on, constant
    assignments additionally grow operator right-hand sides built from the
    program's variables and constants.
    """
    variants: list[Statement] = []
    var_names = sorted(vars_of(prog))
    match stmt:
        case Assign(dst=d, left=l, op=op, right=r):
            for v in var_names:
                variants.append(Assign(v, l, op, r))
            for v in var_names:
                variants.append(Assign(d, v, op, r))
            for v in var_names:
                variants.append(Assign(d, l, op, v))
        case ConstAssign(dst=d, value=k):
            for v in var_names:
                variants.append(ConstAssign(v, k))
            for k2 in sorted(consts_of(prog)):
                variants.append(ConstAssign(d, k2))
            if ext_rep:
                atoms = var_names + sorted(consts_of(prog))
                for op in EXT_REP_OPS:
                    for a in atoms:
                        for b in atoms:
                            variants.append(Assign(d, a, op, b))
        case Read(dst=d):
            for v in var_names:
                variants.append(Read(v))
        case PrintVar() | PrintConst():
            variants.append(PrintAbst())
    return [v for v in dict.fromkeys(variants) if v != stmt]


def rep(prog: Program, label: str, ext_rep: bool = False) -> list[PatchTemplate]:
    """Swap the target statement for each of its single-slot rewrites."""
    out = []
    for variant in rep_variants(prog.stmt_of[label], prog, ext_rep):
        stmt_of, next_of = _maps(prog)
        stmt_of[label] = variant
        out.append(PatchTemplate(
            Program(stmt_of, next_of, prog.entry),
            "rep", label, TIER_REP,
            f"replace {label} with {render_statement(variant)}",
        ))
    return out


def cprep_pool(prog: Program, ext_rep: bool = False) -> list[Statement]:
    """Insertable statements: every simple statement plus its rewrites."""
    pool: list[Statement] = []
    for _, stmt in simple_statements(prog):
        pool.append(stmt)
    for _, stmt in simple_statements(prog):
        pool.extend(rep_variants(stmt, prog, ext_rep))
    return list(dict.fromkeys(pool))


def cprep(prog: Program, label: str, ext_rep: bool = False) -> list[PatchTemplate]:
    """Insert each pool statement immediately before the target."""
    out = []
    for stmt in cprep_pool(prog, ext_rep):
        out.append(PatchTemplate(
            _insert_before(prog, label, stmt),
            "cprep", label, TIER_CPREP,
            f"insert {render_statement(stmt)} before {label}",
        ))
    return out


def generate_space(prog: Program, tl: list[str], config: SpaceConfig = SpaceConfig()) -> list[PatchTemplate]:
    """All templates over the ranked labels, deduplicated and ordered.

    Order: tier, then the target's localization rank, then canonical text.
    Duplicated programs keep their first (highest-priority) occurrence.
    Branch schemas visit only branch labels; abstract-value templates are
    pulled forward into their own tier regardless of generating schema.
    """
    tl = tl[: config.loc_limit]
    rank_of = {lbl: i for i, lbl in enumerate(tl)}
    raw: list[PatchTemplate] = []
    for lbl in tl:
        raw.extend(tighten(prog, lbl))
        raw.extend(loosen(prog, lbl))
        raw.extend(control(prog, lbl, config.goto_control))
        raw.extend(guard(prog, lbl))
        raw.extend(init(prog, lbl))
        raw.extend(rep(prog, lbl, config.ext_rep))
        raw.extend(cprep(prog, lbl, config.ext_rep))

    def final_tier(t: PatchTemplate) -> int:
        if contains_abstval(t.program):
            return TIER_ABSTVAL
        return t.tier

    keyed = sorted(
        raw,
        key=lambda t: (final_tier(t), rank_of[t.target], render_program(t.program)),
    )
    out: list[PatchTemplate] = []
    seen: set[str] = set()
    original = render_program(prog)
    for t in keyed:
        text = render_program(t.program)
        if text == original or text in seen:
            continue
        seen.add(text)
        if final_tier(t) != t.tier:
            t = PatchTemplate(t.program, t.schema, t.target, final_tier(t), t.provenance)
        out.append(t)
    return out
