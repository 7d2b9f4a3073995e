"""The search-space tradeoff, measured on the bundled corpus.

Growing the space repairs more defects but buries correct patches under
plausible-but-incorrect ones: the accept defect flips to blocked under the
extended space because (x < 7) validates before (x == 3). Tier ordering
keeps review cost below a random queue at equal payoff.
"""

from spr.bench import analyze_space, bundled_corpus, compare_orders, explore
from spr.transform import SpaceConfig

corpus = bundled_corpus()
BASE = SpaceConfig()
EXT = SpaceConfig(ext_cond=True, ext_rep=True)

print(f"{'defect':10} {'base size':>9} {'ext size':>8}  {'base rank':>9} {'ext rank':>8}")
for defect in corpus:
    b = analyze_space(defect, BASE)
    e = analyze_space(defect, EXT)
    fmt = lambda r: "-" if r is None else r
    print(f"{defect.id:10} {b.space_size:>9} {e.space_size:>8}  "
          f"{fmt(b.correct_rank):>9} {fmt(e.correct_rank):>8}")
print()

print("collecting every plausible patch for 'accept' (budget 1000):")
for cfg, name in ((BASE, "baseline"), (EXT, "extended")):
    rep = explore(corpus.get("accept"), cfg, budget=1000)
    print(f"  {name:9} plausible={rep.plausible_found} correct={rep.correct_found} "
          f"first-is-correct={rep.first_plausible_is_correct} blocked={rep.blocked}")
print()

cmp_ = compare_orders(corpus, k=10, seeds=100)
print("review effort, summed over the corpus (cost / payoff, k=10):")
print(f"  tier order: {cmp_.spr_tiers.display}")
print(f"  random:     {cmp_.random.display}   (expectation over {cmp_.seeds} seeds)")
