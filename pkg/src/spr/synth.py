"""Staged condition and value synthesis, plus the repair driver.

A condition template is filled in two stages. Stage 1 searches branch
directions per failing case: rerun under a plan, flip the recorded bit
string like a binary counter, and keep the run that produces the expected
output. Only templates with a working direction for every failing case
reach stage 2, which scores concrete comparisons against the recorded
evidence and validates the best few. Value templates skip the direction
search and narrow the print candidates directly from expected outputs.

Plain templates are just validated. The driver walks the whole template
space in priority order and returns the first validated patch.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from spr.interp import (
    ALL_ONES_PLAN,
    AbstPlan,
    EMPTY_PLAN,
    PRESERVE,
    TestCase,
    eval_cond,
    execute,
    run_case,
)
from spr.interp import ABSTVAL as _ABSTVAL_TOKEN
from spr.lang import (
    AbstCond,
    And,
    Branch,
    Cmp,
    Cond,
    Not,
    Or,
    PrintAbst,
    PrintConst,
    PrintVar,
    Program,
    consts_of,
    render_cond,
    vars_of,
)
from spr.localize import localize
from spr.transform import PatchTemplate, SpaceConfig, generate_space

ENGINE_FUEL = 100_000


@dataclass(frozen=True)
class SynthSettings:
    max_flip_trials: int = 11
    top_conditions: int = 20
    fuel: int = ENGINE_FUEL

    def __post_init__(self):
        if self.max_flip_trials < 1:
            raise ValueError("max_flip_trials must be at least 1")
        if self.top_conditions < 1:
            raise ValueError("top_conditions must be at least 1")


@dataclass(frozen=True)
class CandidatePatch:
    """A concrete program built from a template, ready to validate."""

    program: Program
    template: PatchTemplate
    substitution: str | None = None


@dataclass(frozen=True)
class RepairResult:
    patch: CandidatePatch | None
    templates_evaluated: int
    abstc_templates_evaluated: int
    stage2_entries: int
    plausible_rank: int | None
    budget_exhausted: bool
    space_size: int
    elapsed: float

    @property
    def found(self) -> bool:
        return self.patch is not None


def flip(bits: tuple[int, ...]) -> tuple[int, ...]:
    """Next branch-direction prefix: drop trailing ones, flip the last zero.

    All-ones (and empty) input collapses to the empty sequence, which as a
    preserve-plan prefix repeats the very first trial.
    """
    i = len(bits) - 1
    while i >= 0 and bits[i] == 1:
        i -= 1
    if i < 0:
        return ()
    return bits[:i] + (1,)


def score_condition(r: tuple[int, ...], s, cond: Cond) -> int:
    """How many recorded positions the condition reproduces."""
    if len(r) != len(s):
        raise ValueError("recorded bits and snapshots must align")
    return sum(1 for bit, env in zip(r, s) if eval_cond(env, cond) == bit)


# ---------------------------------------------------------------------------
# Stage 1: branch-direction search
# ---------------------------------------------------------------------------

def _search_directions_for_case(
    prog: Program, case: TestCase, settings: SynthSettings
):
    """The first passing run for one failing case, or None.

    Runs the template up to max_flip_trials times: empty prefix first,
    then flipped prefixes of the previous recording, with the force-one
    plan as the last resort. Bottom runs count as failed trials but their
    partial recording still steers the next flip.
    """
    out = execute(prog, case.input, EMPTY_PLAN, settings.fuel)
    if out.ok and out.output == case.expected:
        return out
    for trial in range(1, settings.max_flip_trials):
        if trial == settings.max_flip_trials - 1:
            plan = ALL_ONES_PLAN
        else:
            plan = AbstPlan(flip(out.recorded), PRESERVE)
        out = execute(prog, case.input, plan, settings.fuel)
        if out.ok and out.output == case.expected:
            return out
    return None


def condition_value_search(
    template: PatchTemplate, neg, settings: SynthSettings = SynthSettings()
):
    """Aggregate (R', S') evidence over all failing cases, or None."""
    recorded: list[int] = []
    envs: list[dict] = []
    for case in neg:
        out = _search_directions_for_case(template.program, case, settings)
        if out is None:
            return None
        recorded.extend(out.recorded)
        envs.extend(out.envlog)
    return tuple(recorded), tuple(envs)


# ---------------------------------------------------------------------------
# Stage 2: condition generation and validation
# ---------------------------------------------------------------------------

def condition_candidates(envs, ext_cond: bool = False) -> list[Cond]:
    """Comparisons grounded in the snapshots, deduplicated, stable order."""
    cands: list[Cond] = []
    for env in envs:
        for v in sorted(env):
            k = env[v]
            cands.append(Cmp(v, "==", k))
            cands.append(Not(Cmp(v, "==", k)))
            if ext_cond:
                cands.append(Cmp(v, "<", k))
                cands.append(Cmp(v, ">", k))
    if ext_cond:
        seen_vars = sorted({v for env in envs for v in env})
        for i, v1 in enumerate(seen_vars):
            for v2 in seen_vars[i + 1:]:
                cands.append(Cmp(v1, "==", v2))
        for v1 in seen_vars:
            for v2 in seen_vars:
                if v1 != v2:
                    cands.append(Cmp(v1, "<", v2))
                    cands.append(Cmp(v1, ">", v2))
    return list(dict.fromkeys(cands))


def _candidate_sort_key(scored):
    cond, f = scored
    negated = isinstance(cond, Not)
    core = cond.operand if negated else cond
    return (-f, render_cond(core), negated)


def ranked_conditions(r, s, ext_cond: bool = False) -> list[Cond]:
    """Candidates by descending score; ties by comparison text, plain
    form before its negation."""
    scored = [(c, score_condition(r, s, c)) for c in condition_candidates(s, ext_cond)]
    scored.sort(key=_candidate_sort_key)
    return [c for c, _ in scored]


def _fill_cond(cond: Cond, concrete: Cond) -> Cond:
    match cond:
        case AbstCond():
            return concrete
        case Not(operand=x):
            return Not(_fill_cond(x, concrete))
        case And(left=l, right=r):
            return And(_fill_cond(l, concrete), _fill_cond(r, concrete))
        case Or(left=l, right=r):
            return Or(_fill_cond(l, concrete), _fill_cond(r, concrete))
        case _:
            return cond


def substitute_condition(prog: Program, concrete: Cond) -> Program:
    stmt_of = dict(prog.stmt_of)
    for lbl, stmt in stmt_of.items():
        if isinstance(stmt, Branch):
            stmt_of[lbl] = Branch(
                _fill_cond(stmt.cond, concrete), stmt.on_true, stmt.on_false
            )
    return Program(stmt_of, dict(prog.next_of), prog.entry)


# ---------------------------------------------------------------------------
# Value narrowing
# ---------------------------------------------------------------------------

class _Universal:
    """The unrestricted candidate set: contains every variable and int."""

    def __contains__(self, _item) -> bool:
        return True

    def __repr__(self) -> str:
        return "UNIVERSAL"


UNIVERSAL = _Universal()


def narrow_values(actual, expected, s, cands):
    """Shrink the candidate set against one run's aligned print evidence.

    Walks outputs back to front so each position filters the set already
    narrowed by everything after it. Any concrete mismatch (or a length
    mismatch) empties the set.
    """
    if len(actual) != len(s):
        raise ValueError("snapshots must align with the actual output")
    if len(actual) != len(expected):
        return frozenset()
    current = cands
    for i in range(len(actual) - 1, -1, -1):
        got, want, env = actual[i], expected[i], s[i]
        if got is _ABSTVAL_TOKEN:
            kept = {v for v, val in env.items() if val == want and v in current}
            if want in current:
                kept.add(want)
            current = frozenset(kept)
        elif got != want:
            return frozenset()
    return current


def value_candidates(template_prog: Program, cands) -> list:
    """Concrete fill-ins in validation order: variables, then constants."""
    if isinstance(cands, _Universal):
        names = sorted(vars_of(template_prog))
        consts = sorted(consts_of(template_prog))
    else:
        names = sorted(v for v in cands if isinstance(v, str))
        consts = sorted(v for v in cands if isinstance(v, int))
    return list(names) + list(consts)


def substitute_value(prog: Program, value) -> Program:
    stmt_of = dict(prog.stmt_of)
    for lbl, stmt in stmt_of.items():
        if isinstance(stmt, PrintAbst):
            stmt_of[lbl] = PrintVar(value) if isinstance(value, str) else PrintConst(value)
    return Program(stmt_of, dict(prog.next_of), prog.entry)


# ---------------------------------------------------------------------------
# Per-template evaluation
# ---------------------------------------------------------------------------

@dataclass
class TemplateEvaluation:
    patches: list[CandidatePatch]
    entered_stage2: bool = False

    @property
    def first(self) -> CandidatePatch | None:
        return self.patches[0] if self.patches else None


class TemplateEvaluator:
    """Validates candidates for one suite, remembering killer positives.

    A positive case that fails a candidate moves to the front of the
    positive list, so later candidates die as early as possible. The
    set of validated patches is unaffected by this reordering.
    """

    def __init__(self, neg, pos, settings: SynthSettings, ext_cond: bool):
        self.neg = list(neg)
        self.pos = list(pos)
        self.settings = settings
        self.ext_cond = ext_cond

    def _validate(self, prog: Program) -> bool:
        fuel = self.settings.fuel
        for case in self.neg:
            if not run_case(prog, case, fuel):
                return False
        for i, case in enumerate(self.pos):
            if not run_case(prog, case, fuel):
                if i:
                    self.pos.insert(0, self.pos.pop(i))
                return False
        return True

    def _condition_template(self, template, all_passers) -> TemplateEvaluation:
        evidence = condition_value_search(template, self.neg, self.settings)
        if evidence is None:
            return TemplateEvaluation([])
        r, s = evidence
        for case in self.pos:
            out = execute(template.program, case.input, EMPTY_PLAN, self.settings.fuel)
            r += out.recorded
            s += out.envlog
        result = TemplateEvaluation([], entered_stage2=True)
        for cond in ranked_conditions(r, s, self.ext_cond)[: self.settings.top_conditions]:
            patched = substitute_condition(template.program, cond)
            if self._validate(patched):
                result.patches.append(CandidatePatch(patched, template, render_cond(cond)))
                if not all_passers:
                    break
        return result

    def _value_template(self, template, all_passers) -> TemplateEvaluation:
        cands = UNIVERSAL
        for case in self.neg:
            out = execute(template.program, case.input, EMPTY_PLAN, self.settings.fuel)
            if not out.ok:
                return TemplateEvaluation([])
            cands = narrow_values(out.output, case.expected, out.envlog, cands)
            if not isinstance(cands, _Universal) and not cands:
                return TemplateEvaluation([])
        result = TemplateEvaluation([])
        for value in value_candidates(template.program, cands):
            patched = substitute_value(template.program, value)
            if self._validate(patched):
                result.patches.append(CandidatePatch(patched, template, str(value)))
                if not all_passers:
                    break
        return result

    def evaluate(self, template: PatchTemplate, all_passers: bool = False) -> TemplateEvaluation:
        kind = template.kind
        if kind == "abstc":
            return self._condition_template(template, all_passers)
        if kind == "abstval":
            return self._value_template(template, all_passers)
        if self._validate(template.program):
            return TemplateEvaluation([CandidatePatch(template.program, template)])
        return TemplateEvaluation([])


def synthesize_condition(
    template: PatchTemplate, neg, pos,
    settings: SynthSettings = SynthSettings(), ext_cond: bool = False,
) -> CandidatePatch | None:
    return TemplateEvaluator(neg, pos, settings, ext_cond).evaluate(template).first


def synthesize_value(
    template: PatchTemplate, neg, pos, settings: SynthSettings = SynthSettings()
) -> CandidatePatch | None:
    return TemplateEvaluator(neg, pos, settings, False).evaluate(template).first


# ---------------------------------------------------------------------------
# Repair driver
# ---------------------------------------------------------------------------

def _evaluate_block(templates, neg, pos, settings, ext_cond):
    ev = TemplateEvaluator(neg, pos, settings, ext_cond)
    return [(ev.evaluate(t), t.kind) for t in templates]


def repair(
    prog: Program,
    neg,
    pos,
    cfg: SpaceConfig = SpaceConfig(),
    settings: SynthSettings = SynthSettings(),
    template_budget: int | None = None,
    time_budget: float | None = None,
    jobs: int = 1,
) -> RepairResult:
    """First validated patch over the priority-ordered template space.

    The result is deterministic for a given configuration, including
    under a worker pool: workers speculate ahead, but results commit in
    space order and the first passer wins.
    """
    if all(run_case(prog, case, settings.fuel) for case in neg):
        raise ValueError("program passes every failing case; nothing to repair")
    started = time.monotonic()
    deadline = None if time_budget is None else started + time_budget
    tl = localize(prog, neg, pos, limit=cfg.loc_limit, fuel=settings.fuel)
    space = generate_space(prog, tl, cfg)
    limit = len(space) if template_budget is None else min(template_budget, len(space))

    evaluated = 0
    abstc_evaluated = 0
    stage2 = 0
    patch = None
    rank = None
    out_of_time = False

    def commit(evaluation: TemplateEvaluation, kind: str) -> bool:
        nonlocal evaluated, abstc_evaluated, stage2, patch, rank
        evaluated += 1
        if kind == "abstc":
            abstc_evaluated += 1
            if evaluation.entered_stage2:
                stage2 += 1
        if evaluation.patches:
            patch = evaluation.first
            rank = evaluated
            return True
        return False

    if jobs <= 1 or limit <= 1:
        ev = TemplateEvaluator(neg, pos, settings, cfg.ext_cond)
        for template in space[:limit]:
            if deadline is not None and time.monotonic() > deadline:
                out_of_time = True
                break
            if commit(ev.evaluate(template), template.kind):
                break
    else:
        chunk = max(1, min(25, limit // (jobs * 2) or 1))
        blocks = [space[i: i + chunk] for i in range(0, limit, chunk)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_evaluate_block, b, list(neg), list(pos), settings, cfg.ext_cond)
                for b in blocks
            ]
            done = False
            for fut in futures:
                if done:
                    fut.cancel()
                    continue
                if deadline is not None and time.monotonic() > deadline:
                    out_of_time = True
                    done = True
                    fut.cancel()
                    continue
                for evaluation, kind in fut.result():
                    if commit(evaluation, kind):
                        done = True
                        break

    exhausted = patch is None and (out_of_time or evaluated < len(space))
    return RepairResult(
        patch=patch,
        templates_evaluated=evaluated,
        abstc_templates_evaluated=abstc_evaluated,
        stage2_entries=stage2,
        plausible_rank=rank,
        budget_exhausted=exhausted,
        space_size=len(space),
        elapsed=time.monotonic() - started,
    )
