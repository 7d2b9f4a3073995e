"""Acceptance gates.

Each test covers one numbered criterion and prints a single PASS/FAIL line
with the measured numbers, so a teed pytest run doubles as the report.
"""

import random
import re
import time

import pytest

from spr.bench import adjudicate, bundled_corpus, compare_orders, explore
from spr.interp import ABSTVAL, TestCase, execute, run_case
from spr.lang import Cmp, Not
from spr.localize import localize
from spr.synth import UNIVERSAL, flip, narrow_values, repair, score_condition
from spr.transform import SpaceConfig, generate_space
from tests.support import (
    brute_force_repair_exists,
    generate_tiny_program,
    mutate_program,
)

EXT = SpaceConfig(loc_limit=200, ext_cond=True, ext_rep=True)


@pytest.fixture(scope="module")
def corpus():
    return bundled_corpus()


def _verdict(criterion: str, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} — {detail}"
    print(line)
    assert ok, line


def _baseline_space(defect, cfg):
    ranked = localize(defect.program, list(defect.neg), list(defect.pos),
                      limit=cfg.loc_limit)
    return generate_space(defect.program, ranked, cfg)


def test_criterion_1_semantics_preservation(corpus):
    started = time.perf_counter()
    cfg = SpaceConfig(goto_control=True)  # widest condition-template crop
    templates = 0
    mismatches = 0
    for defect in corpus:
        for template in _baseline_space(defect, cfg):
            if template.kind != "abstc":
                continue
            templates += 1
            for case in (*defect.neg, *defect.pos):
                want = execute(defect.program, case.input)
                got = execute(template.program, case.input)  # empty plan preserves
                if want.output != got.output or want.fault != got.fault:
                    mismatches += 1
    elapsed = time.perf_counter() - started
    ok = templates > 200 and mismatches == 0 and elapsed < 30
    _verdict(
        "1 semantics-preservation", ok,
        f"{templates} condition templates, {mismatches} mismatches, "
        f"{elapsed:.1f}s (limit 30s)",
    )


def test_criterion_2_flip_score_narrow_properties():
    rng = random.Random(20260815)
    failures = 0

    for _ in range(1000):  # flip is binary increment, all-ones wraps to ()
        n = rng.randrange(1, 17)
        bits = tuple(rng.randrange(2) for _ in range(n))
        flipped = flip(bits)
        if all(bits):
            failures += flipped != ()
        else:
            padded = flipped + (0,) * (n - len(flipped))
            failures += int("".join(map(str, padded)), 2) != int(
                "".join(map(str, bits)), 2) + 1

    for _ in range(500):  # the condition score is additive over splits
        n = rng.randrange(0, 12)
        r = tuple(rng.randrange(2) for _ in range(n))
        s = tuple({v: rng.randrange(-3, 6) for v in ("a", "b")} for _ in range(n))
        cond = Cmp(rng.choice(("a", "b")), rng.choice(("==", "<", ">")),
                   rng.randrange(-3, 6))
        if rng.random() < 0.4:
            cond = Not(cond)
        k = rng.randrange(0, n + 1)
        total = score_condition(r, s, cond)
        failures += total != (score_condition(r[:k], s[:k], cond)
                              + score_condition(r[k:], s[k:], cond))

    narrowed_cases = 0
    for _ in range(200):  # everything narrowing keeps reproduces the wants
        runs = []
        for run_idx in range(rng.randrange(1, 4)):
            m = rng.randrange(1, 4)
            s = tuple({v: rng.randrange(-3, 6) for v in ("a", "b")} for _ in range(m))
            actual, expected = [], []
            for i, env in enumerate(s):
                abstract = i == 0 and run_idx == 0 or rng.random() < 0.5
                if abstract:
                    actual.append(ABSTVAL)
                    expected.append(env[rng.choice(("a", "b"))]
                                    if rng.random() < 0.7 else rng.randrange(-3, 6))
                else:
                    v = rng.randrange(-3, 6)
                    actual.append(v)
                    expected.append(v if rng.random() < 0.8 else rng.randrange(-3, 6))
            runs.append((tuple(actual), tuple(expected), s))
        cands = UNIVERSAL
        for actual, expected, s in runs:
            cands = narrow_values(actual, expected, s, cands)
        narrowed_cases += 1
        for value in cands:
            for actual, expected, s in runs:
                for i, token in enumerate(actual):
                    if token is ABSTVAL:
                        token = s[i].get(value, 0) if isinstance(value, str) else value
                    failures += token != expected[i]

    ok = failures == 0 and narrowed_cases == 200
    _verdict(
        "2 flip/score/narrow properties", ok,
        f"1000 flip sequences, 500 score splits, {narrowed_cases} narrowing "
        f"cases, {failures} failures",
    )


def _tiny_defect(rng):
    """Mutant plus suite: up to two failing and two passing cases."""
    while True:
        reference = generate_tiny_program(rng)
        mutant = mutate_program(reference, rng)
        if mutant is None:
            continue
        neg, pos = [], []
        vectors = dict.fromkeys(
            tuple(rng.randrange(3) for _ in range(4)) for _ in range(6))
        for i, vec in enumerate(vectors):
            want = execute(reference, vec, fuel=2000)
            if want.fault:
                continue
            case = TestCase(f"c{i}", vec, want.output)
            if run_case(mutant, case, 2000):
                if len(pos) < 2:
                    pos.append(case)
            elif len(neg) < 2:
                neg.append(case)
        if neg:
            return mutant, neg, pos


def test_criterion_3_oracle_equivalence():
    started = time.perf_counter()
    rng = random.Random(77)
    agree = 0
    trials = 100
    for _ in range(trials):
        mutant, neg, pos = _tiny_defect(rng)
        staged = repair(mutant, neg, pos).found
        brute = brute_force_repair_exists(mutant, neg, pos)
        agree += staged == brute
    elapsed = time.perf_counter() - started
    ok = agree == trials and elapsed < 300
    _verdict(
        "3 oracle equivalence", ok,
        f"{agree}/{trials} verdicts match brute force, {elapsed:.1f}s (limit 300s)",
    )


def test_criterion_4_corpus_repair(corpus):
    started = time.perf_counter()
    missed = []
    correct_first = 0
    for defect in corpus:
        result = repair(defect.program, list(defect.neg), list(defect.pos),
                        template_budget=5000)
        has_plausible = explore(defect).plausible_found > 0
        if has_plausible and not result.found:
            missed.append(defect.id)
        if result.found and adjudicate(result.patch, defect):
            correct_first += 1
    elapsed = time.perf_counter() - started
    threshold = corpus.correct_first_threshold
    ok = not missed and correct_first >= threshold and elapsed < 600
    _verdict(
        "4 corpus repair", ok,
        f"plausible found wherever one exists (missed: {missed or 'none'}), "
        f"correct patch first-to-validate on {correct_first}/{len(corpus)} "
        f"(threshold {threshold}), {elapsed:.1f}s (limit 600s)",
    )


def test_criterion_5_staging_filter(corpus):
    stage2 = 0
    abstc = 0
    for defect in corpus:
        result = repair(defect.program, list(defect.neg), list(defect.pos),
                        template_budget=5000)
        stage2 += result.stage2_entries
        abstc += result.abstc_templates_evaluated
    ratio = stage2 / abstc
    ok = ratio <= 0.20
    _verdict(
        "5 staging filter", ok,
        f"stage-2 entries {stage2} / {abstc} abstc templates evaluated "
        f"= {ratio:.2%} (limit 20%)",
    )


def test_criterion_6_search_space_tradeoff(corpus):
    from spr.bench import analyze_space

    base_cfg = SpaceConfig()
    grew = ranks_ok = bad_ok = 0
    flips = []
    for defect in corpus:
        base = analyze_space(defect, base_cfg)
        ext = analyze_space(defect, EXT)
        grew += ext.space_size > base.space_size
        if base.correct_in_space:
            ranks_ok += ext.correct_in_space and ext.correct_rank >= base.correct_rank
        else:
            ranks_ok += 1  # nothing to push later

        base_run = explore(defect, base_cfg, budget=1000, space_report=base)
        ext_run = explore(defect, EXT, budget=1000, space_report=ext)
        bad_ok += (ext_run.plausible_found - ext_run.correct_found
                   >= base_run.plausible_found - base_run.correct_found)
        if not base_run.blocked and ext_run.blocked:
            flips.append(defect.id)
    n = len(corpus)
    ok = grew == n and ranks_ok == n and bad_ok == n and bool(flips)
    _verdict(
        "6 search-space tradeoff", ok,
        f"space grew {grew}/{n}, correct rank non-decreasing {ranks_ok}/{n}, "
        f"incorrect-plausible count non-decreasing {bad_ok}/{n}, "
        f"unblocked-to-blocked flips: {flips or 'none'}",
    )


def test_criterion_7_prioritization(corpus):
    cmp_ = compare_orders(corpus, k=10, seeds=100)
    shape = re.compile(r"^\d+(\.\d+)? / \d+(\.\d+)?$")
    ok = (cmp_.spr_tiers.payoff >= cmp_.random.payoff
          and shape.match(cmp_.spr_tiers.display)
          and shape.match(cmp_.random.display))
    _verdict(
        "7 prioritization", bool(ok),
        f"tier order {cmp_.spr_tiers.display} vs random {cmp_.random.display} "
        f"(cost / payoff, k=10, 100 seeds)",
    )
