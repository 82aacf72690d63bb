"""Shared builders for the test suite."""

import dataclasses

import pytest

from fairsim.engine import SimulationEngine
from fairsim.network import Network, Constant, PROFILES
from fairsim.endorsing import Peer, Client, EndorsementPolicy, Transaction
from fairsim.ordering import Orderer, ConsensusParams
from fairsim.metrics import TraceLogs
from fairsim.harness import SimulationConfig


def micro_config(**overrides) -> SimulationConfig:
    """A seconds-scale configuration for wiring-level tests."""
    base = dict(
        seed=1, clients=2, peers=4, orderers=4, quorum=2,
        delay_profile="small", num_puzzles=6, puzzle_interval=200,
        solve_mean=20.0, heartbeat_interval=20, phase_timeout=1500,
        drain_margin=5000, g_min=3, score_max=0.75,
    )
    base.update(overrides)
    return SimulationConfig(**base)


def logs_from_trace(trace: dict) -> TraceLogs:
    """TraceLogs built from the plain-dict trace shape used by the oracles."""
    return TraceLogs(
        peers_total=trace["peers_total"],
        orderers_total=trace["orderers_total"],
        send_log=dict(trace["send_log"]),
        peer_logs={k: list(v) for k, v in trace["peer_logs"].items()},
        orderer_logs={k: list(v) for k, v in trace["orderer_logs"].items()},
        delivery=dict(trace["delivery"]),
        solutions={k: dict(v) for k, v in trace["solutions"].items()},
    )


class StagedWorld:
    """Constant-delay component assembly: peers, orderers, two clients.

    Orderers are built but never started, so consensus stays quiet and
    proposal construction can be driven directly.
    """

    def __init__(self, vote_rule: str = "off", quorum: int = 3,
                 num_peers: int = 3, num_orderers: int = 2, seed: int = 0):
        self.engine = SimulationEngine(seed)
        self.network = Network(self.engine, PROFILES["small"])
        self.peer_ids = [f"p{i + 1}" for i in range(num_peers)]
        self.orderer_ids = [f"o{i + 1}" for i in range(num_orderers)]
        self.client_ids = ["cA", "cB"]

        self.logs = TraceLogs(peers_total=num_peers, orderers_total=num_orderers)
        self.peers = {
            pid: Peer(pid, self.engine, self.network,
                      self.logs.peer_logs.setdefault(pid, []))
            for pid in self.peer_ids
        }
        params = ConsensusParams(n_prime=num_orderers, endorse_quorum=quorum,
                                 phase_timeout=10_000, vote_rule=vote_rule)
        self.commits = []
        self.orderers = {
            oid: Orderer(oid, i, self.engine, self.network, params,
                         self.orderer_ids, self.peer_ids,
                         self.logs.orderer_logs.setdefault(oid, []),
                         lambda o, b: self.commits.append((o, b)))
            for i, oid in enumerate(self.orderer_ids)
        }
        policy = EndorsementPolicy(quorum, num_peers)
        self.clients = {
            cid: Client(cid, self.engine, self.network, self.peer_ids,
                        self.orderer_ids, policy, self.logs.send_log)
            for cid in self.client_ids
        }
        for src in self.client_ids:
            for dst in self.peer_ids + self.orderer_ids:
                self.network.set_channel_delay(src, dst, Constant(1))
        for src in self.peer_ids:
            for dst in self.client_ids:
                self.network.set_channel_delay(src, dst, Constant(1))

    def set_delay(self, src: str, dst: str, ticks: int):
        self.network.set_channel_delay(src, dst, Constant(ticks))

    def submit(self, client_id: str, tx_id: str, puzzle: int = 0):
        tx = Transaction(tx_id, client_id, puzzle, self.engine.now)
        self.clients[client_id].submit(tx)
        return tx


def staged_two_tx_scenario(vote_rule: str) -> StagedWorld:
    """Two transactions, three peers, two orderers, full-quorum endorsement.

    Channel delays are staged so that peers p1 and p2 see x1 before x2 while
    p3 sees x2 first, and both orderers receive endorsed x2 before endorsed
    x1. Endorsement counters therefore rank x1 above x2 on two of the three
    ballots while the proposers' FIFO order starts with x2.
    """
    world = StagedWorld(vote_rule=vote_rule)
    world.set_delay("cA", "p3", 5)   # x1 reaches p3 last
    world.set_delay("cB", "p1", 3)   # x2 reaches p1/p2 after x1
    world.set_delay("cB", "p2", 3)
    world.submit("cA", "x1")
    world.submit("cB", "x2")
    world.engine.run_until(50)
    return world


@pytest.fixture
def staged_world():
    return StagedWorld()


def replace_config(config: SimulationConfig, **overrides) -> SimulationConfig:
    return dataclasses.replace(config, **overrides)
