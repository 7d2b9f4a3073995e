"""The patch-template space: seven schemas, tiered priority order.

Condition schemas leave a hole (abstc) to be filled by stage-2 synthesis;
replacement schemas over prints leave a value hole (abstval); the rest are
concrete programs ready to validate.
"""

from collections import Counter

from spr.bench import bundled_corpus
from spr.lang import render_program
from spr.localize import localize
from spr.transform import SpaceConfig, generate_space

defect = bundled_corpus().get("accept")
ranked = localize(defect.program, list(defect.neg), list(defect.pos))

for cfg, name in (
    (SpaceConfig(), "baseline"),
    (SpaceConfig(ext_cond=True, ext_rep=True), "extended (RExt grows it; CExt acts later)"),
):
    space = generate_space(defect.program, ranked, cfg)
    census = Counter(t.schema for t in space)
    print(f"{name}: {len(space)} templates")
    for schema, count in sorted(census.items()):
        print(f"  {schema:10} {count}")
    print()

space = generate_space(defect.program, ranked, SpaceConfig())
shown = set()
print("first template of each schema, in priority order:")
for rank, template in enumerate(space, start=1):
    if template.schema in shown:
        continue
    shown.add(template.schema)
    print(f"--- rank {rank}, tier {template.tier}, {template.schema} at {template.target} ({template.kind})")
    print(render_program(template.program))
