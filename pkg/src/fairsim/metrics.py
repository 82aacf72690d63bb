"""Fairness measurement over a completed run.

Logs: submission ticks per transaction, per-peer arrival order of endorse
requests, per-orderer arrival order of endorsed transactions, and the
delivery position (block height, intra-block index) per transaction.

Six order-fairness counts pair an orientation predicate (submission order,
majority peer-reception order, majority orderer-reception order) with a
violation predicate over delivery (delivered later; in a strictly later
block). Scores, the adversary goal check and block statistics complete the
per-run report.
"""

import math
from dataclasses import dataclass, field, asdict

ALPHA_KINDS = ("snd", "eds", "ord")  # submission / peer-reception / orderer-reception
BETA_KINDS = ("dlv", "blc")          # delivery order / strict block order

X_FIRST = "x_first"
X_PRIME_FIRST = "x_prime_first"
NEITHER = "neither"


@dataclass
class TraceLogs:
    """Immutable-after-run log bundle consumed by the metrics functions."""

    peers_total: int
    orderers_total: int
    send_log: dict = field(default_factory=dict)      # tx id -> sent tick
    peer_logs: dict = field(default_factory=dict)     # peer id -> [tx id, ...]
    orderer_logs: dict = field(default_factory=dict)  # orderer id -> [tx id, ...]
    delivery: dict = field(default_factory=dict)      # tx id -> (height, index)
    solutions: dict = field(default_factory=dict)     # puzzle id -> {client: tx id}
    block_sizes: list = field(default_factory=list)

    _peer_pos: dict | None = None
    _orderer_pos: dict | None = None

    def peer_positions(self) -> dict:
        if self._peer_pos is None:
            self._peer_pos = {p: {t: i for i, t in enumerate(lst)}
                              for p, lst in self.peer_logs.items()}
        return self._peer_pos

    def orderer_positions(self) -> dict:
        if self._orderer_pos is None:
            self._orderer_pos = {o: {t: i for i, t in enumerate(lst)}
                                 for o, lst in self.orderer_logs.items()}
        return self._orderer_pos


def enumerate_pairs(logs: TraceLogs) -> list:
    """All unordered pairs of delivered solution transactions of the same
    puzzle; heartbeats never enter the solutions registry."""
    delivery = logs.delivery
    pairs = []
    for by_client in logs.solutions.values():
        delivered = [t for t in by_client.values() if t in delivery]
        delivered.sort()  # stable pair identity independent of dict order
        for i in range(len(delivered)):
            for j in range(i + 1, len(delivered)):
                pairs.append((delivered[i], delivered[j]))
    return pairs


def _majority_orientation(position_maps: dict, total: int, x: str, x_prime: str) -> str:
    """Strict majority (> total/2) over agents that logged both transactions."""
    x_before = 0
    prime_before = 0
    for pos in position_maps.values():
        px = pos.get(x)
        if px is None:
            continue
        py = pos.get(x_prime)
        if py is None:
            continue
        if px < py:
            x_before += 1
        else:
            prime_before += 1
    if 2 * x_before > total:
        return X_FIRST
    if 2 * prime_before > total:
        return X_PRIME_FIRST
    return NEITHER


def alpha_predicate(kind: str, x: str, x_prime: str, logs: TraceLogs) -> str:
    """Orientation of a pair under one of the three communication orders."""
    if kind == "snd":
        sx = logs.send_log[x]
        sy = logs.send_log[x_prime]
        if sx < sy:
            return X_FIRST
        if sy < sx:
            return X_PRIME_FIRST
        return NEITHER
    if kind == "eds":
        return _majority_orientation(logs.peer_positions(), logs.peers_total, x, x_prime)
    if kind == "ord":
        return _majority_orientation(logs.orderer_positions(), logs.orderers_total, x, x_prime)
    raise ValueError(f"unknown alpha kind {kind!r}")


def count_of_violations(alpha_kind: str, beta_kind: str, logs: TraceLogs,
                        pairs=None) -> int:
    """Violations over enumerated pairs: orient by alpha, skip `neither` and
    undelivered, then check the delivery side."""
    if beta_kind not in BETA_KINDS:
        raise ValueError(f"unknown beta kind {beta_kind!r}")
    if pairs is None:
        pairs = enumerate_pairs(logs)
    delivery = logs.delivery
    strict_block = beta_kind == "blc"
    count = 0
    for x, x_prime in pairs:
        dx = delivery.get(x)
        dy = delivery.get(x_prime)
        if dx is None or dy is None:
            continue
        orient = alpha_predicate(alpha_kind, x, x_prime, logs)
        if orient == NEITHER:
            continue
        first, second = (dx, dy) if orient == X_FIRST else (dy, dx)
        if strict_block:
            if first[0] > second[0]:
                count += 1
        elif first > second:
            count += 1
    return count


def of_counts(logs: TraceLogs) -> dict:
    pairs = enumerate_pairs(logs)
    return {f"of_{a}_{b}": count_of_violations(a, b, logs, pairs)
            for a in ALPHA_KINDS for b in BETA_KINDS}


def evaluate_goal(g: int, score, g_min: int, score_max: float) -> bool:
    """The adversary's objective: enough resolved games and a target score
    pushed below the threshold."""
    if score is None:
        return False
    return g > g_min and score < score_max


def block_stats(block_sizes) -> tuple:
    """(block count, nearest-rank 75th percentile of per-block tx counts)."""
    num = len(block_sizes)
    if num == 0:
        return 0, 0
    ordered = sorted(block_sizes)
    rank = math.ceil(0.75 * num)
    return num, ordered[rank - 1]


@dataclass
class MetricsReport:
    of_snd_dlv: int
    of_snd_blc: int
    of_eds_dlv: int
    of_eds_blc: int
    of_ord_dlv: int
    of_ord_blc: int
    score_target: float | None
    scores: dict                 # client id -> float | None
    g: int
    num_blocks: int
    blocksize_q3: int
    goal_met: bool
    pair_count: int
    chains_consistent: bool

    def to_dict(self) -> dict:
        return asdict(self)


def build_report(logs: TraceLogs, game_result, target_client: str, m: int,
                 g_min: int, score_max: float, chains_consistent: bool,
                 score_fn) -> MetricsReport:
    pairs = enumerate_pairs(logs)
    counts = {f"of_{a}_{b}": count_of_violations(a, b, logs, pairs)
              for a in ALPHA_KINDS for b in BETA_KINDS}
    scores = {c: score_fn(game_result, c, m) for c in game_result.wins}
    score_target = scores.get(target_client)
    num_blocks, q3 = block_stats(logs.block_sizes)
    return MetricsReport(
        of_snd_dlv=counts["of_snd_dlv"],
        of_snd_blc=counts["of_snd_blc"],
        of_eds_dlv=counts["of_eds_dlv"],
        of_eds_blc=counts["of_eds_blc"],
        of_ord_dlv=counts["of_ord_dlv"],
        of_ord_blc=counts["of_ord_blc"],
        score_target=None if score_target is None else float(score_target),
        scores={c: (None if s is None else float(s)) for c, s in scores.items()},
        g=game_result.g,
        num_blocks=num_blocks,
        blocksize_q3=q3,
        goal_met=evaluate_goal(game_result.g, score_target, g_min, score_max),
        pair_count=len(pairs),
        chains_consistent=chains_consistent,
    )
