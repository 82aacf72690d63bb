"""Puzzle-competition workload.

Puzzles are revealed on a fixed cadence to every competing client at the
same tick; each client solves after an independent Poisson-distributed
delay and submits one solution transaction per puzzle. A synthetic
non-competing client emits heartbeat transactions on its own cadence to
keep the system under load. Winners come from the delivery order.
"""

from dataclasses import dataclass
from fractions import Fraction

from .endorsing import Transaction, HEARTBEAT
from .network import poisson_sample

REVEAL = "reveal"
SOLVE = "solve"
HEARTBEAT_EMIT = "heartbeat"


@dataclass
class GameResult:
    wins: dict          # client id -> games won
    g: int              # puzzles with at least one delivered solution
    winners: dict       # puzzle id -> (client id, winning tx id)


def solution_tx_id(client_id: str, puzzle_id: int) -> str:
    return f"{client_id}:s{puzzle_id}"


class PuzzleGame:
    def __init__(self, engine, clients, heartbeat_client, num_puzzles: int,
                 puzzle_interval: int, solve_mean: float, heartbeat_interval: int,
                 horizon: int):
        self.engine = engine
        self.clients = tuple(clients)  # competing clients only
        self.heartbeat_client = heartbeat_client
        self.num_puzzles = num_puzzles
        self.puzzle_interval = puzzle_interval
        self.solve_mean = solve_mean
        self.heartbeat_interval = heartbeat_interval
        self.horizon = horizon
        self.solutions = {}  # puzzle id -> {client id: tx id}
        self._beats = 0

    def schedule(self):
        for k in range(self.num_puzzles):
            self.engine.schedule((k + 1) * self.puzzle_interval, REVEAL,
                                 self._on_reveal, k)
        if self.heartbeat_client is not None and self.heartbeat_interval > 0:
            self.engine.schedule(self.heartbeat_interval, HEARTBEAT_EMIT,
                                 self._on_heartbeat, None)

    def _on_reveal(self, puzzle_id: int):
        now = self.engine.now
        registry = self.solutions[puzzle_id] = {}
        for client in self.clients:
            rng = self.engine.stream(f"solve:{client.id}")
            delay = max(1, poisson_sample(rng, self.solve_mean))
            tx = Transaction(solution_tx_id(client.id, puzzle_id), client.id,
                             puzzle_id, now + delay)
            registry[client.id] = tx.id
            self.engine.schedule(now + delay, SOLVE, client.submit, tx)

    def _on_heartbeat(self, _):
        now = self.engine.now
        hb = self.heartbeat_client
        self._beats += 1
        hb.submit(Transaction(f"{hb.id}:b{self._beats}", hb.id, HEARTBEAT, now))
        nxt = now + self.heartbeat_interval
        if nxt <= self.horizon:
            self.engine.schedule(nxt, HEARTBEAT_EMIT, self._on_heartbeat, None)


def resolve_games(solutions: dict, delivery: dict, client_ids) -> GameResult:
    """Winner per puzzle = the delivered solution minimal in
    (block height, intra-block index)."""
    wins = {c: 0 for c in client_ids}
    winners = {}
    g = 0
    for puzzle_id, by_client in solutions.items():
        best = None
        for client_id, tx_id in by_client.items():
            pos = delivery.get(tx_id)
            if pos is not None and (best is None or pos < best[0]):
                best = (pos, client_id, tx_id)
        if best is not None:
            g += 1
            wins[best[1]] += 1
            winners[puzzle_id] = (best[1], best[2])
    return GameResult(wins, g, winners)


def client_fairness_score(result: GameResult, client_id: str, m: int):
    """Win share scaled by the number of competing clients; 1 is perfectly
    fair. Undefined (None) when no game resolved."""
    if result.g == 0:
        return None
    return Fraction(result.wins.get(client_id, 0), result.g) * m
