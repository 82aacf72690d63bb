"""fairsim: a deterministic, seeded simulator of an endorse-then-order
blockchain network (clients, endorsing peers, vote-based orderers) under a
budget-constrained adversary, with client-fairness and order-fairness
measurement and an optional ballot-based ordering defense."""

from .engine import SimulationEngine, SchedulingError
from .network import Network, Constant, PoissonDelay, Hypoexponential, DelayProfile, PROFILES
from .adversary import (
    Adversary,
    AdversaryAction,
    AssumptionContext,
    enabled_actions,
    plan_attack,
    PeerSabotage,
    OrdererCensorProposals,
    OrdererWithholdVotes,
)
from .endorsing import endorsement_probability
from .mitigation import extract_ballots, order_by_vote
from .metrics import MetricsReport, count_of_violations, alpha_predicate, block_stats
from .harness import SimulationConfig, SweepSpec, run_one, run_sweep, PRESETS

__version__ = "0.1.0"
