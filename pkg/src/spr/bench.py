"""Defect corpus management, correctness adjudication, and search-space studies.

A Defect bundles a buggy program with its validation suite, held-out cases,
and an optional reference fix. Adjudication is mechanized: a plausible patch
counts as correct when it passes validation plus held-out and, if a reference
exists, agrees with it on a deterministic differential battery. The battery
combines the defect's own inputs, single-position mutants of them, all short
vectors over the small values seen in the defect, and a seeded random tail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib  # type: ignore[no-redef]

from importlib import resources

from .interp import TestCase, execute, parse_test_case, run_case
from .lang import Program, parse_program
from .localize import localize
from .synth import CandidatePatch, SynthSettings, TemplateEvaluator
from .transform import SpaceConfig, generate_space


class CorpusError(Exception):
    """A defect directory is missing pieces or contradicts its own suite."""


@dataclass(frozen=True)
class Defect:
    id: str
    program: Program
    neg: tuple[TestCase, ...]
    pos: tuple[TestCase, ...]
    heldout: tuple[TestCase, ...] = ()
    reference: Program | None = None
    kind: str = ""
    summary: str = ""


@dataclass(frozen=True)
class Corpus:
    defects: tuple[Defect, ...]
    correct_first_threshold: int = 7

    def __iter__(self):
        return iter(self.defects)

    def __len__(self) -> int:
        return len(self.defects)

    def get(self, defect_id: str) -> Defect:
        for d in self.defects:
            if d.id == defect_id:
                return d
        raise CorpusError(f"no defect named {defect_id!r}")


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------
# Loaders accept anything path-like that supports the importlib.resources
# traversable protocol, so the bundled corpus works from a wheel as well as
# from a source checkout.

def _load_cases(root, *parts) -> tuple[TestCase, ...]:
    node = root
    for part in parts:
        node = node / part
    if not node.is_dir():
        return ()
    files = sorted((f for f in node.iterdir() if f.name.endswith(".txt")), key=lambda f: f.name)
    return tuple(parse_test_case(f.read_text(), name=f.name) for f in files)


def load_defect(path, defect_id: str | None = None, fuel: int | None = None) -> Defect:
    defect_id = defect_id or path.name
    source = path / "program.spr"
    if not source.is_file():
        raise CorpusError(f"{defect_id}: missing program.spr")
    try:
        program = parse_program(source.read_text())
        ref_file = path / "reference.spr"
        reference = parse_program(ref_file.read_text()) if ref_file.is_file() else None
        neg = _load_cases(path, "tests", "neg")
        pos = _load_cases(path, "tests", "pos")
        heldout = _load_cases(path, "heldout")
    except ValueError as err:
        raise CorpusError(f"{defect_id}: {err}") from None

    meta = {}
    meta_file = path / "meta.toml"
    if meta_file.is_file():
        meta = tomllib.loads(meta_file.read_text())

    check_fuel = fuel or SynthSettings().fuel
    if not any(not run_case(program, c, check_fuel) for c in neg):
        raise CorpusError(f"{defect_id}: no negative case fails the buggy program")
    if reference is not None:
        for case in (*neg, *pos, *heldout):
            if not run_case(reference, case, check_fuel):
                raise CorpusError(f"{defect_id}: reference fails case {case.name}")
    return Defect(
        defect_id, program, neg, pos, heldout, reference,
        kind=str(meta.get("kind", "")), summary=str(meta.get("summary", "")),
    )


def load_corpus(root) -> Corpus:
    defects_dir = root / "defects"
    if not defects_dir.is_dir():
        raise CorpusError(f"{root}: no defects/ directory")
    meta = {}
    meta_file = root / "meta.toml"
    if meta_file.is_file():
        meta = tomllib.loads(meta_file.read_text())
    ids = meta.get("defects") or sorted(d.name for d in defects_dir.iterdir() if d.is_dir())
    defects = tuple(load_defect(defects_dir / did, did) for did in ids)
    return Corpus(defects, int(meta.get("correct_first_threshold", 7)))


def bundled_corpus() -> Corpus:
    return load_corpus(resources.files(__package__) / "corpus")


# ---------------------------------------------------------------------------
# Correctness adjudication
# ---------------------------------------------------------------------------

FUZZ_VALUES = (-1, 0, 1, 2, 3)
FUZZ_RANDOM_TRIALS = 30


def fuzz_battery(defect: Defect, seed: int = 0) -> tuple[tuple[int, ...], ...]:
    """Deterministic input vectors for differential comparison.

    Every input vector of the defect's own cases appears verbatim and as
    single-position mutants over the value pool, so behavior near the
    validated inputs is probed systematically rather than by luck.
    """
    pool = set(FUZZ_VALUES)
    case_inputs = []
    for case in (*defect.neg, *defect.pos, *defect.heldout):
        case_inputs.append(tuple(case.input))
        pool.update(case.input)
        pool.update(case.expected)
    values = sorted(pool)

    vectors: dict[tuple[int, ...], None] = dict.fromkeys(case_inputs)
    for vec in case_inputs:
        for i in range(len(vec)):
            for v in values:
                vectors.setdefault(vec[:i] + (v,) + vec[i + 1:], None)
    vectors.setdefault((), None)
    for a in values:
        vectors.setdefault((a,), None)
        for b in values:
            vectors.setdefault((a, b), None)
    rng = random.Random(seed)
    for _ in range(FUZZ_RANDOM_TRIALS):
        n = rng.randrange(0, 6)
        vectors.setdefault(tuple(rng.randrange(-4, 10) for _ in range(n)), None)
    return tuple(vectors)


def adjudicate(patch, defect: Defect, settings: SynthSettings | None = None, seed: int = 0) -> bool:
    """Correct iff the patch passes validation plus held-out and, when a
    reference exists, matches its full outcome on the fuzz battery."""
    settings = settings or SynthSettings()
    program = getattr(patch, "program", patch)
    for case in (*defect.neg, *defect.pos, *defect.heldout):
        if not run_case(program, case, settings.fuel):
            return False
    if defect.reference is not None:
        for vec in fuzz_battery(defect, seed):
            got = execute(program, vec, fuel=settings.fuel)
            want = execute(defect.reference, vec, fuel=settings.fuel)
            if got.output != want.output or got.fault != want.fault:
                return False
    return True


# ---------------------------------------------------------------------------
# Search-space reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceReport:
    defect_id: str
    cfg: SpaceConfig
    space_size: int
    correct_in_space: bool
    correct_rank: int | None
    plausible_in_space: bool
    first_plausible_rank: int | None


@dataclass(frozen=True)
class ExploreReport:
    defect_id: str
    cfg: SpaceConfig
    budget: int
    order: str
    seed: int
    space_size: int
    templates_evaluated: int
    plausible_found: int
    correct_found: int
    first_plausible_is_correct: bool
    blocked: bool
    timed_out: bool
    verdicts: tuple[bool, ...] = ()


def _space_for(defect: Defect, cfg: SpaceConfig, settings: SynthSettings):
    ranked = localize(defect.program, list(defect.neg), list(defect.pos),
                      limit=cfg.loc_limit, fuel=settings.fuel)
    return generate_space(defect.program, ranked, cfg)


def analyze_space(
    defect: Defect,
    cfg: SpaceConfig | None = None,
    settings: SynthSettings | None = None,
    adjudication_seed: int = 0,
) -> SpaceReport:
    """Capability scan: every plausible patch each template can yield (within
    the per-template validation budget) is adjudicated, so correct_rank is the
    first template ABLE to produce a correct patch, not merely the first whose
    best-scored candidate happens to be correct."""
    cfg = cfg or SpaceConfig()
    settings = settings or SynthSettings()
    space = _space_for(defect, cfg, settings)
    evaluator = TemplateEvaluator(defect.neg, defect.pos, settings, cfg.ext_cond)
    first_plausible = None
    correct_rank = None
    for rank, template in enumerate(space, start=1):
        outcome = evaluator.evaluate(template, all_passers=True)
        if outcome.patches and first_plausible is None:
            first_plausible = rank
        if correct_rank is None and any(
            adjudicate(p, defect, settings, adjudication_seed) for p in outcome.patches
        ):
            correct_rank = rank
    return SpaceReport(
        defect.id, cfg, len(space),
        correct_in_space=correct_rank is not None,
        correct_rank=correct_rank,
        plausible_in_space=first_plausible is not None,
        first_plausible_rank=first_plausible,
    )


def explore(
    defect: Defect,
    cfg: SpaceConfig | None = None,
    settings: SynthSettings | None = None,
    budget: int | None = None,
    order: str = "spr_tiers",
    seed: int = 0,
    space_report: SpaceReport | None = None,
    adjudication_seed: int = 0,
) -> ExploreReport:
    """Scan the space without stopping at the first plausible patch.

    Collects every plausible patch (with its adjudication) from the first
    `budget` templates. order="random" re-ranks the collected patches by a
    seeded shuffle, modeling a review queue with no tier prioritization.
    """
    if order not in ("spr_tiers", "random"):
        raise ValueError(f"unknown order {order!r}")
    cfg = cfg or SpaceConfig()
    settings = settings or SynthSettings()
    space = _space_for(defect, cfg, settings)
    limit = len(space) if budget is None else min(budget, len(space))
    evaluator = TemplateEvaluator(defect.neg, defect.pos, settings, cfg.ext_cond)
    patches: list[CandidatePatch] = []
    for template in space[:limit]:
        patches.extend(evaluator.evaluate(template, all_passers=True).patches)
    if order == "random":
        random.Random(seed).shuffle(patches)
    verdicts = tuple(adjudicate(p, defect, settings, adjudication_seed) for p in patches)

    blocked = False
    if patches and not verdicts[0]:
        if space_report is None:
            space_report = analyze_space(defect, cfg, settings, adjudication_seed)
        blocked = space_report.correct_in_space
    return ExploreReport(
        defect.id, cfg, len(space) if budget is None else budget, order, seed,
        space_size=len(space),
        templates_evaluated=limit,
        plausible_found=len(patches),
        correct_found=sum(verdicts),
        first_plausible_is_correct=bool(verdicts and verdicts[0]),
        blocked=blocked,
        timed_out=limit < len(space),
        verdicts=verdicts,
    )


# ---------------------------------------------------------------------------
# Prioritization comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderStats:
    cost: float
    payoff: float

    @property
    def display(self) -> str:
        return f"{self.cost:g} / {self.payoff:g}"


@dataclass(frozen=True)
class OrderComparison:
    k: int
    budget: int | None
    seeds: int
    spr_tiers: OrderStats
    random: OrderStats


def _review(verdicts, k: int) -> tuple[int, int]:
    """Patches reviewed until the first correct one (or k exhausted), and
    whether a correct patch sits within the first k."""
    for i, ok in enumerate(verdicts[:k], start=1):
        if ok:
            return i, 1
    return min(len(verdicts), k), 0


def compare_orders(
    corpus,
    cfg: SpaceConfig | None = None,
    settings: SynthSettings | None = None,
    budget: int | None = None,
    k: int = 10,
    seeds: int = 100,
    adjudication_seed: int = 0,
) -> OrderComparison:
    if k < 1:
        raise ValueError("review depth k must be >= 1")
    defects = list(corpus)
    reports = [
        explore(d, cfg, settings, budget=budget, adjudication_seed=adjudication_seed)
        for d in defects
    ]

    spr_cost = spr_payoff = 0
    for report in reports:
        cost, payoff = _review(report.verdicts, k)
        spr_cost += cost
        spr_payoff += payoff

    total_cost = total_payoff = 0
    for s in range(seeds):
        for idx, report in enumerate(reports):
            shuffled = list(report.verdicts)
            # int-derived stream per (seed, defect): hash() would not be
            # stable across processes
            random.Random(s * 1_000_003 + idx).shuffle(shuffled)
            cost, payoff = _review(shuffled, k)
            total_cost += cost
            total_payoff += payoff
    return OrderComparison(
        k, budget, seeds,
        OrderStats(float(spr_cost), float(spr_payoff)),
        OrderStats(round(total_cost / seeds, 2), round(total_payoff / seeds, 2)),
    )
