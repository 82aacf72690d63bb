"""Budget-constrained programmatic adversary.

Seven action kinds gated by the (failure model, communication model)
assumption pair; vector budgets over (peer, orderer) resources; per-target
protection levels that modulate costs via the element-wise product and drop
to zero once paid (re-targeting the same resource is free). Applying an
action charges the budget (the attack transition); ordinary protocol events
never touch it (the exec transition).
"""

import math
from dataclasses import dataclass
from enum import Enum

# action kinds
REVEAL = "reveal"
LISTEN = "listen"
SEND = "send"
STOP = "stop"
SKIP = "skip"
DELAY = "delay"
INJECT = "inject"

ALL_KINDS = (REVEAL, LISTEN, SEND, STOP, SKIP, DELAY, INJECT)


class FailureModel(str, Enum):
    CRASH = "crash"
    OMISSION = "omission"
    PERFORMANCE = "performance"
    BYZANTINE = "byzantine"


class CommunicationModel(str, Enum):
    SYNCHRONOUS = "synchronous"
    ASYNCHRONOUS = "asynchronous"
    EVENTUALLY_SYNCHRONOUS = "eventually_synchronous"


@dataclass(frozen=True)
class AssumptionContext:
    failure_model: FailureModel
    communication: CommunicationModel


@dataclass(frozen=True)
class EnabledActions:
    """One gating-table cell: the directly enabled kinds plus whether delay
    amounts must stay under the synchrony cap."""

    kinds: frozenset
    bounded_delay: bool = False

    def allows(self, kind: str) -> bool:
        if kind == LISTEN:
            # listening is the message-level restriction of reveal
            return REVEAL in self.kinds
        if kind == STOP:
            # stopping is the all-message case of skipping
            return STOP in self.kinds or SKIP in self.kinds
        return kind in self.kinds


def enabled_actions(ctx: AssumptionContext) -> EnabledActions:
    """The full 12-cell gating table."""
    f = FailureModel(ctx.failure_model)
    c = CommunicationModel(ctx.communication)
    if f == FailureModel.BYZANTINE:
        # inject subsumes every other action
        return EnabledActions(frozenset({INJECT}))
    if f == FailureModel.PERFORMANCE:
        # timing faults are the failure itself, so no synchrony cap applies
        return EnabledActions(frozenset({REVEAL, DELAY}))
    degrade = STOP if f == FailureModel.CRASH else SKIP
    if c == CommunicationModel.ASYNCHRONOUS:
        # unbounded delays already subsume message suppression
        return EnabledActions(frozenset({REVEAL, DELAY}))
    bounded = c == CommunicationModel.SYNCHRONOUS
    return EnabledActions(frozenset({REVEAL, degrade, DELAY}), bounded)


# ---------------------------------------------------------------------------
# vector arithmetic over the (peer, orderer) resource space

def vec_le(a, b) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]

def vec_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])

def vec_mul(a, b):
    return (a[0] * b[0], a[1] * b[1])


# ---------------------------------------------------------------------------
# behavior patches installed by inject

class BehaviorPatch:
    def install(self, agent):
        raise NotImplementedError


@dataclass(frozen=True)
class PeerSabotage(BehaviorPatch):
    """The peer never endorses the target client's transactions but keeps
    logging receptions like any honest peer."""

    target_client: str

    def install(self, agent):
        agent.sabotage_clients.add(self.target_client)


@dataclass(frozen=True)
class OrdererCensorProposals(BehaviorPatch):
    """The orderer's own proposals omit the target client's transactions."""

    target_client: str

    def install(self, agent):
        agent.censor_clients.add(self.target_client)


@dataclass(frozen=True)
class OrdererWithholdVotes(BehaviorPatch):
    """The orderer votes NIL whenever a proposal contains the target's
    transactions, and behaves honestly otherwise."""

    target_client: str

    def install(self, agent):
        agent.withhold_clients.add(self.target_client)


@dataclass
class AdversaryAction:
    kind: str
    target: str                  # sub-system id the action lands on
    cost: tuple = (0, 0)         # baseline cost vector
    fire_at: int = 0
    direction: str = "io"        # i, o or io, for listen/skip/delay
    delta: int | None = None     # delay ticks; None holds messages forever
    patch: BehaviorPatch | None = None


FRESH_PROTECTION = (1, 1)


class Adversary:
    """Budget ledger plus protection table; applies actions through the gate.

    A rejected action leaves budget, protections and the system untouched.
    """

    def __init__(self, context: AssumptionContext, budget):
        self.context = context
        self.budget = (int(budget[0]), int(budget[1]))
        self.initial_budget = self.budget
        self.enabled = enabled_actions(context)
        self.protections = {}  # target -> vector; absent means fresh (1, 1)
        self.applied = []      # (action, charged cost)
        self.rejected = []     # (action, reason)

    def protection(self, target: str):
        return self.protections.get(target, FRESH_PROTECTION)

    def effective_cost(self, action: AdversaryAction):
        return vec_mul(action.cost, self.protection(action.target))

    def try_apply(self, action: AdversaryAction, network=None, agents=None):
        """Attempt one attack transition. Returns (True, cost) when applied,
        (False, reason) when gated or over budget."""
        if not self.enabled.allows(action.kind):
            self.rejected.append((action, "gated"))
            return False, "gated"
        if action.kind == DELAY and self.enabled.bounded_delay:
            delta_cap = network.profile.delta if network is not None else math.inf
            if action.delta is None or action.delta >= delta_cap:
                # unbounded or cap-breaking holds contradict synchrony
                self.rejected.append((action, "gated"))
                return False, "gated"
        cost = self.effective_cost(action)
        if not vec_le(cost, self.budget):
            self.rejected.append((action, "over_budget"))
            return False, "over_budget"
        self.budget = vec_sub(self.budget, cost)
        prot = list(self.protection(action.target))
        if action.cost[0] > 0:
            prot[0] = 0
        if action.cost[1] > 0:
            prot[1] = 0
        self.protections[action.target] = tuple(prot)
        self.applied.append((action, cost))
        self._install(action, network, agents)
        return True, cost

    def spent(self):
        total = (0, 0)
        for _, cost in self.applied:
            total = (total[0] + cost[0], total[1] + cost[1])
        return total

    def _install(self, action: AdversaryAction, network, agents):
        k = action.kind
        if k in (REVEAL, LISTEN, SEND):
            return  # observation only; nothing in the honest execution changes
        if k == INJECT:
            action.patch.install(agents[action.target])
            return
        icpt = network.intercept(action.target)
        if k == STOP:
            icpt.stopped = True
            return
        inward = action.direction in ("i", "io")
        outward = action.direction in ("o", "io")
        if k == SKIP:
            if inward:
                icpt.skip_in = True
            if outward:
                icpt.skip_out = True
            return
        if k == DELAY:
            if inward:
                icpt.delay_in = None if (action.delta is None or icpt.delay_in is None) \
                    else icpt.delay_in + action.delta
            if outward:
                icpt.delay_out = None if (action.delta is None or icpt.delay_out is None) \
                    else icpt.delay_out + action.delta
            return
        raise ValueError(f"unknown action kind {k!r}")


def bft_peer_cap(n: int) -> int:
    return n - math.ceil(n / 2)


def bft_orderer_cap(n_prime: int) -> int:
    return (n_prime - 1) // 3


def plan_attack(n: int, n_prime: int, infected_peers: int, infected_orderers: int,
                withhold_votes: bool, target_client: str, budget,
                within_bft: bool = True) -> list:
    """Static tick-0 plan: sabotage the first infected_peers peer ids and
    censor (plus optionally withhold on) the first infected_orderers orderer
    ids, all against one target client. Lowest-id targets keep sweeps
    deterministic; ids are exchangeable by symmetry."""
    if infected_peers < 0 or infected_orderers < 0:
        raise ValueError("infection counts must be non-negative")
    if infected_peers > n:
        raise ValueError(f"infected_peers {infected_peers} exceeds peer count {n}")
    if infected_orderers > n_prime:
        raise ValueError(f"infected_orderers {infected_orderers} exceeds orderer count {n_prime}")
    if within_bft:
        if infected_peers > bft_peer_cap(n):
            raise ValueError(
                f"infected_peers {infected_peers} breaks the BFT hypothesis cap {bft_peer_cap(n)}")
        if infected_orderers > bft_orderer_cap(n_prime):
            raise ValueError(
                f"infected_orderers {infected_orderers} breaks the BFT hypothesis cap {bft_orderer_cap(n_prime)}")
    needed = (infected_peers, infected_orderers)
    if not vec_le(needed, budget):
        raise ValueError(f"plan needs budget {needed}, declared budget is {tuple(budget)}")
    plan = []
    for i in range(infected_peers):
        plan.append(AdversaryAction(INJECT, f"p{i}", cost=(1, 0),
                                    patch=PeerSabotage(target_client)))
    for j in range(infected_orderers):
        plan.append(AdversaryAction(INJECT, f"o{j}", cost=(0, 1),
                                    patch=OrdererCensorProposals(target_client)))
        if withhold_votes:
            # second action on the same orderer: protection already consumed,
            # so this one is free
            plan.append(AdversaryAction(INJECT, f"o{j}", cost=(0, 1),
                                        patch=OrdererWithholdVotes(target_client)))
    return plan
