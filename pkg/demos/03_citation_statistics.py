"""The statistical toolkit on citation-like data.

Citation counts are heavy-tailed, so the workflow is: test normality
first (it fails), then compare groups with a rank test and report
medians rather than means.
"""

import random

from pubtrace.stats import dagostino_pearson, mann_whitney_u, median, proportion_table

rng = random.Random(11)

# Two synthetic citation populations: "published" papers draw from a
# heavier-tailed distribution than "unpublished" ones.
published = [int(rng.paretovariate(1.1)) for _ in range(2000)]
unpublished = [int(rng.paretovariate(1.6)) - 1 for _ in range(1500)]

print("normality (D'Agostino-Pearson omnibus, alpha = 0.005):")
for name, sample in (("published", published), ("unpublished", unpublished)):
    result = dagostino_pearson(sample)
    verdict = "reject normality" if result.reject_h0_at(0.005) else "cannot reject"
    print(f"  {name:12s} K2 = {result.statistic:10.1f}  p = {result.p_value:.3g}  -> {verdict}")

comparison = mann_whitney_u(published, unpublished)
print("\nrank comparison (Mann-Whitney U, two-sided):")
print(f"  U = {comparison.statistic:.1f}  p = {comparison.p_value:.3g}"
      f"  -> {'different distributions' if comparison.reject_h0_at(0.005) else 'no evidence'}")

print("\nmedians (the right summary once normality fails):")
print(f"  published   {median(published):.1f}")
print(f"  unpublished {median(unpublished):.1f}")

print("\nzero-citation proportions:")
for key, count, fraction in proportion_table(
    [("published", c == 0) for c in published] + [("unpublished", c == 0) for c in unpublished],
    key=lambda item: (item[0], "zero" if item[1] else "cited"),
):
    print(f"  {key[0]:12s} {key[1]:6s} {count:5d}  ({fraction:.1%} of all papers)")
