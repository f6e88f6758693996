"""
Comparing strategies with rank tests
====================================

Run-level results are rarely normal, so the comparison uses rank tests:
Kruskal-Wallis across groups, then paired Wilcoxon signed-rank tests on
matched runs.  Both are implemented from scratch in
``pbsb.evaluation.stats`` with their p-values computed in-house.
"""
import numpy as np

from pbsb.evaluation import kruskal_wallis, strategy_average, wilcoxon_signed_rank

###############################################################################
# Three groups with no overlap give the largest possible H for 3x3 data.
print(kruskal_wallis([[1, 2, 3], [4, 5, 6], [7, 8, 9]]))

###############################################################################
# Paired differences between two strategies over ten matched runs.  With
# ``n <= 20`` the p-value is exact; larger samples use the normal
# approximation with tie and continuity corrections.
rng = np.random.default_rng(7)
a = 0.83 + rng.normal(0, 0.004, 10)
b = a + 0.006 + rng.normal(0, 0.004, 10)
print(wilcoxon_signed_rank(b - a))

###############################################################################
# Averaging one strategy over four policies.
print(strategy_average([0.833, 0.825, 0.832, 0.796]))
print(strategy_average([1461, 928, 1171, 948]))
