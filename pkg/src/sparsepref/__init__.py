"""Interactive decision support under sparse, unknown linear utilities.

Find a user's single favorite row through short attribute-subset questions,
or return a low-regret K-set when they stop early.
"""

from .dataset import (Dataset, Direction, RawTable, TableError, load_csv,
                      load_table, project, read_raw_csv, skyline)
from .preference import (Answer, AnswerKind, SimulatedUser, UtilityVector,
                         gen_sparse_utility, max_regret_ratio, partial_utility,
                         regret_ratio, simulate_answer, utility)
from .session import Session, SessionConfig, SessionResult, create_session
from .single_round import (CoverageReport, SubsetRunConfig, attribute_subset,
                           coverage_probability, rounds_for_confidence,
                           single_round_core)

__version__ = "0.1.0"

__all__ = [
    "Answer", "AnswerKind", "CoverageReport", "Dataset", "Direction",
    "RawTable", "Session", "SessionConfig", "SessionResult", "SimulatedUser",
    "SubsetRunConfig", "TableError", "UtilityVector", "attribute_subset",
    "coverage_probability", "create_session", "gen_sparse_utility", "load_csv",
    "load_table", "max_regret_ratio", "partial_utility", "project",
    "read_raw_csv", "regret_ratio", "rounds_for_confidence", "simulate_answer",
    "single_round_core", "skyline", "utility",
]
