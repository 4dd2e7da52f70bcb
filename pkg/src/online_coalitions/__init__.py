"""Online coalition formation in additively separable hedonic games."""

from .adversary import (
    Entry,
    FamilySpec,
    InstanceDistribution,
    claim2_characterization,
    gen_prop1,
    gen_prop_cis_feng,
    gen_thm3,
    gen_thm5,
    gen_thm6,
    generate,
    sample,
)
from .algorithms import (
    AllSingletons,
    CNSMatcher,
    GrandCoalition,
    GreedyWelfare,
    SerialDictatorship,
    UniformRandom,
    make_policy,
)
from .errors import (
    CapacityError,
    CoalitionError,
    DomainError,
    InvalidDeviation,
    ModeError,
    ParseError,
    PreconditionViolation,
    ProtocolViolation,
)
from .game import Game, GameClass, Partition, classify, coalition_utility, restrict_game
from .harness import estimate_guarantee, table_matrix, wilson_interval
from .io import parse_instance, parse_partition, write_instance, write_partition
from .online import Observation, OnlinePolicy, Trace, min_over_orders, run_online
from .oracle import Mode, all_stable, enumerate_partitions, evaluate_policy, exists_stable, solve_minimax
from .stability import Concept, Deviation, find_deviation, is_pareto_optimal, is_stable

__version__ = "0.1.0"
