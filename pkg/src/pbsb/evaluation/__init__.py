from .metrics import accuracy_trajectory, convergence_time, cumulative_regret, global_accuracy, strategy_average
from .results import AggregateReport, CellSummary, RunResult, aggregate, significance_battery
from .special import chi2_sf, gammainc_lower, gammainc_upper
from .stats import KruskalResult, WilcoxonResult, kruskal_wallis, midranks, wilcoxon_signed_rank

__all__ = [
    "AggregateReport",
    "CellSummary",
    "KruskalResult",
    "RunResult",
    "WilcoxonResult",
    "accuracy_trajectory",
    "aggregate",
    "chi2_sf",
    "convergence_time",
    "cumulative_regret",
    "gammainc_lower",
    "gammainc_upper",
    "global_accuracy",
    "kruskal_wallis",
    "midranks",
    "significance_battery",
    "strategy_average",
    "wilcoxon_signed_rank",
]
