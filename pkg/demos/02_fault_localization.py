"""Where should the repair look first?

Spectrum scores from instrumented runs: a label is suspicious when failing
runs reach it (a), passing runs avoid it (b), and failing runs execute it
late (c). The ranking orders the patch-template search.
"""

from spr.bench import bundled_corpus
from spr.localize import localization_scores, localize

defect = bundled_corpus().get("accept")
print("defect 'accept': branch admits 5 but the suite also wants 3 admitted")
print()

scores = localization_scores(defect.program, list(defect.neg), list(defect.pos))
ranked = localize(defect.program, list(defect.neg), list(defect.pos))

print(f"{'label':6} {'a':>3} {'b':>3} {'c':>3}  rank")
for rank, label in enumerate(ranked, start=1):
    s = scores[label]
    print(f"{label:6} {s.a:>3} {s.b:>3} {s.c:>3}  {rank}")

print()
print("ties in (a, b) break on c, the last-execution stamp: later is guiltier.")
print("the limit admits a prefix of this ranking as transformation targets:")
for limit in (2, 4):
    print(f"  limit={limit}: {localize(defect.program, list(defect.neg), list(defect.pos), limit=limit)}")
