"""Assembly of one complete run.

Builds the engine, network, clients, peers and orderers for a validated
configuration, installs the static tick-0 attack plan through the budget
gate, runs the puzzle workload to the horizon plus drain margin, and
reduces the logs to a metrics report.

The first orderer to commit each height defines the ground-truth chain;
every later commit of that height must match it exactly, so a safety
violation aborts the run instead of producing silently wrong metrics.
"""

from dataclasses import dataclass

from .engine import SimulationEngine
from .network import Network, PROFILES
from .adversary import Adversary, AssumptionContext, FailureModel, CommunicationModel, plan_attack
from .endorsing import Client, Peer, EndorsementPolicy
from .ordering import Orderer, ConsensusParams
from .game import PuzzleGame, resolve_games, client_fairness_score
from .metrics import TraceLogs, build_report, MetricsReport


class ChainForkError(AssertionError):
    """Two orderers committed different blocks at one height."""


class _CommitLedger:
    """Ground-truth delivery bookkeeping shared by all orderers."""

    def __init__(self, logs: TraceLogs):
        self.logs = logs
        self.blocks = {}          # height -> tx id tuple
        self.consistent = True
        self.delivery_unique = True

    def on_commit(self, orderer_id: str, block):
        known = self.blocks.get(block.height)
        if known is not None:
            if known != block.txs:
                self.consistent = False
                raise ChainForkError(
                    f"height {block.height}: {orderer_id} committed {block.txs!r}, "
                    f"ground truth is {known!r}")
            return
        self.blocks[block.height] = block.txs
        self.logs.block_sizes.append(len(block.txs))
        delivery = self.logs.delivery
        for idx, tx_id in enumerate(block.txs):
            if tx_id in delivery:
                self.delivery_unique = False
                raise ChainForkError(f"transaction {tx_id} delivered twice")
            delivery[tx_id] = (block.height, idx)


@dataclass
class RunResult:
    report: MetricsReport
    logs: TraceLogs
    game_result: object
    budget_spent: tuple
    budget_remaining: tuple
    dispatch_count: int
    final_tick: int
    chain_length: int


class Simulation:
    def __init__(self, config):
        config.validate()
        self.config = config
        self.engine = SimulationEngine(config.seed)
        self.profile = PROFILES[config.delay_profile]
        self.network = Network(self.engine, self.profile)

        self.logs = TraceLogs(peers_total=config.peers, orderers_total=config.orderers)
        self.ledger = _CommitLedger(self.logs)

        peer_ids = [f"p{i}" for i in range(config.peers)]
        orderer_ids = [f"o{i}" for i in range(config.orderers)]
        client_ids = [f"c{i}" for i in range(config.clients)]
        self.target_client = client_ids[0]

        policy = EndorsementPolicy(config.quorum, config.peers)
        self.peers = [
            Peer(pid, self.engine, self.network,
                 self.logs.peer_logs.setdefault(pid, []))
            for pid in peer_ids
        ]
        params = ConsensusParams(
            n_prime=config.orderers,
            endorse_quorum=config.quorum,
            phase_timeout=config.phase_timeout,
            vote_rule=config.mitigation,
        )
        self.orderers = [
            Orderer(oid, i, self.engine, self.network, params, orderer_ids,
                    peer_ids, self.logs.orderer_logs.setdefault(oid, []),
                    self.ledger.on_commit)
            for i, oid in enumerate(orderer_ids)
        ]
        self.clients = [
            Client(cid, self.engine, self.network, peer_ids, orderer_ids,
                   policy, self.logs.send_log)
            for cid in client_ids
        ]
        self.heartbeat_client = Client("hb", self.engine, self.network, peer_ids,
                                       orderer_ids, policy, self.logs.send_log,
                                       competing=False)

        self.horizon = config.num_puzzles * config.puzzle_interval
        self.limit = self.horizon + config.drain_margin
        self.game = PuzzleGame(
            self.engine, self.clients, self.heartbeat_client,
            config.num_puzzles, config.puzzle_interval, config.solve_mean,
            config.heartbeat_interval, self.limit)
        self.game.solutions = self.logs.solutions  # shared registry

        context = AssumptionContext(FailureModel(config.failure_model),
                                    CommunicationModel(config.communication))
        self.adversary = Adversary(context, config.effective_budget())
        self.plan = plan_attack(
            config.peers, config.orderers, config.infected_peers,
            config.infected_orderers, config.withhold_votes,
            self.target_client, self.adversary.budget,
            within_bft=config.within_bft)

    def run(self) -> RunResult:
        agents = {a.id: a for a in self.peers + self.orderers}
        for action in self.plan:
            applied, outcome = self.adversary.try_apply(action, self.network, agents)
            if not applied:
                raise RuntimeError(
                    f"attack plan action {action.kind} on {action.target} rejected: {outcome}")
        self.game.schedule()
        for orderer in self.orderers:
            orderer.start()
        trace = self.engine.run_until(self.limit)

        result = resolve_games(self.game.solutions, self.logs.delivery,
                               [c.id for c in self.clients])
        report = build_report(
            self.logs, result, self.target_client, self.config.clients,
            self.config.g_min, self.config.score_max,
            self.ledger.consistent and self._final_chains_identical(),
            client_fairness_score)
        return RunResult(
            report=report,
            logs=self.logs,
            game_result=result,
            budget_spent=self.adversary.spent(),
            budget_remaining=self.adversary.budget,
            dispatch_count=trace.dispatch_count,
            final_tick=trace.final_tick,
            chain_length=len(self.ledger.blocks),
        )

    def _final_chains_identical(self) -> bool:
        """Every orderer's final chain must be a prefix of the ground truth
        (commit-time checks already force content equality per height)."""
        for orderer in self.orderers:
            for block in orderer.chain:
                if self.ledger.blocks.get(block.height) != block.txs:
                    return False
        return True
