"""Inside one repair: direction search, then condition synthesis.

Stage 1 asks "is there any sequence of branch outcomes that fixes the
failing runs?" before any concrete condition is built. Only survivors pay
for stage 2, where recorded evidence is turned into ranked predicates.
"""

from spr.bench import bundled_corpus
from spr.lang import render_cond, render_program
from spr.localize import localize
from spr.synth import (
    condition_value_search,
    ranked_conditions,
    repair,
    score_condition,
    synthesize_condition,
)
from spr.transform import SpaceConfig, generate_space

defect = bundled_corpus().get("accept")
ranked = localize(defect.program, list(defect.neg), list(defect.pos))
space = generate_space(defect.program, ranked, SpaceConfig())

tighten, loosen = space[0], space[1]
print("tier 1 templates, in order:")
for t in (tighten, loosen):
    print(f"  {t.schema} at {t.target}: "
          + render_program(t.program).splitlines()[2])
print()

print("stage 1, tighten: no branch-direction sequence fixes the failing case")
print(f"  -> {condition_value_search(tighten, list(defect.neg))}")
evidence = condition_value_search(loosen, list(defect.neg))
print("stage 1, loosen: found one, so it records evidence (R', S')")
print(f"  -> R'={evidence[0]} S'={evidence[1]}")
print()

r, s = evidence
print("stage 2 ranks concrete conditions by how much evidence they reproduce:")
for cond in ranked_conditions(r, s):
    print(f"  F={score_condition(r, s, cond)}  {render_cond(cond)}")
print()

patch = synthesize_condition(loosen, list(defect.neg), list(defect.pos))
print(f"first validated substitution: {patch.substitution}")
print()

result = repair(defect.program, list(defect.neg), list(defect.pos))
print("the driver walks the whole space in priority order; stats:")
print(f"  templates evaluated:      {result.templates_evaluated}")
print(f"  condition templates:      {result.abstc_templates_evaluated}")
print(f"  stage-2 entries:          {result.stage2_entries}   <- the staging filter")
print(f"  plausible patch at rank:  {result.plausible_rank}")
print()
print(render_program(result.patch.program))
