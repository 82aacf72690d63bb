"""Independent reference implementations used to check the package.

Everything here is deliberately written the slow, obvious way (exact
rational arithmetic, double loops, list.index) and shares no code with the
package under test.
"""

import math
from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------------------
# endorsement probability

def binomial_tail_exact(n: int, b: int, q: int, x) -> Fraction:
    """P[Binomial(n - b, x) >= q] as an exact fraction."""
    honest = n - b
    fx = Fraction(x)
    total = Fraction(0)
    for k in range(q, honest + 1):
        total += math.comb(honest, k) * fx**k * (1 - fx) ** (honest - k)
    return total


def monte_carlo_endorsement(n: int, b: int, q: int, x: float, trials: int,
                            seed: int) -> float:
    """Simulate the endorsement race: each non-sabotaged peer independently
    endorses the watched transaction first with probability x; success is
    reaching the quorum."""
    honest = n - b
    if honest <= 0:
        return 1.0 if q <= 0 else 0.0
    rng = np.random.default_rng(seed)
    wins = (rng.random((trials, honest)) < x).sum(axis=1)
    return float((wins >= q).mean())


# ---------------------------------------------------------------------------
# order-fairness counts

def brute_force_of_counts(send_log, peer_logs, orderer_logs, delivery,
                          solutions, peers_total, orderers_total) -> dict:
    """All six violation counts recomputed with naive double loops."""

    pairs = []
    for puzzle in sorted(solutions):
        txs = sorted(t for t in solutions[puzzle].values() if t in delivery)
        for i in range(len(txs)):
            for j in range(i + 1, len(txs)):
                pairs.append((txs[i], txs[j]))

    def orient(alpha, x, y):
        """Return (first, second) or None when neither direction holds."""
        if alpha == "snd":
            if send_log[x] < send_log[y]:
                return x, y
            if send_log[y] < send_log[x]:
                return y, x
            return None
        agent_logs = peer_logs if alpha == "eds" else orderer_logs
        total = peers_total if alpha == "eds" else orderers_total
        x_before = 0
        y_before = 0
        for entries in agent_logs.values():
            if x in entries and y in entries:
                if entries.index(x) < entries.index(y):
                    x_before += 1
                else:
                    y_before += 1
        if 2 * x_before > total:
            return x, y
        if 2 * y_before > total:
            return y, x
        return None

    counts = {}
    for alpha in ("snd", "eds", "ord"):
        for beta in ("dlv", "blc"):
            violations = 0
            for x, y in pairs:
                if x not in delivery or y not in delivery:
                    continue
                oriented = orient(alpha, x, y)
                if oriented is None:
                    continue
                first, second = oriented
                if beta == "dlv":
                    if delivery[first] > delivery[second]:
                        violations += 1
                else:
                    if delivery[first][0] > delivery[second][0]:
                        violations += 1
            counts[f"of_{alpha}_{beta}"] = violations
    return counts


def random_trace(rng) -> dict:
    """A random small system trace as plain dicts and lists.

    Arrival logs are arbitrary per-agent permutations of subsets, send
    ticks collide on purpose, some transactions stay undelivered, and the
    delivery map is injective by construction.
    """
    clients = rng.randint(1, 4)
    peers = rng.randint(1, 5)
    orderers = rng.randint(1, 5)
    puzzles = rng.randint(1, 6)

    txs = []
    solutions = {}
    for p in range(puzzles):
        by_client = {}
        for c in range(clients):
            if len(txs) < 30 and rng.random() < 0.85:
                tx_id = f"c{c}:s{p}"
                by_client[f"c{c}"] = tx_id
                txs.append(tx_id)
        solutions[p] = by_client

    send_log = {t: rng.randint(0, 12) for t in txs}

    def random_logs(count, prefix):
        logs = {}
        for i in range(count):
            seen = [t for t in txs if rng.random() < 0.8]
            rng.shuffle(seen)
            logs[f"{prefix}{i}"] = seen
        return logs

    peer_logs = random_logs(peers, "p")
    orderer_logs = random_logs(orderers, "o")

    backlog = [t for t in txs if rng.random() < 0.8]
    rng.shuffle(backlog)
    delivery = {}
    height = 0
    while backlog:
        for idx in range(min(len(backlog), rng.randint(1, 4))):
            delivery[backlog.pop()] = (height, idx)
        height += 1

    return {
        "send_log": send_log,
        "peer_logs": peer_logs,
        "orderer_logs": orderer_logs,
        "delivery": delivery,
        "solutions": solutions,
        "peers_total": peers,
        "orderers_total": orderers,
    }


# ---------------------------------------------------------------------------
# misc

def nearest_rank_q3(values) -> int:
    """75th percentile, nearest-rank definition, found by linear scan."""
    if not values:
        return 0
    ordered = sorted(values)
    n = len(ordered)
    rank = 0
    while rank + 1 < 0.75 * n:
        rank += 1
    return ordered[rank]


def naive_vote_scores(rankings, rule: str) -> dict:
    """Positional scores recomputed directly from a list of rankings."""
    scores = {}
    for ranking in rankings:
        for pos, tx in enumerate(ranking):
            if rule == "dowdall":
                weight = Fraction(1, pos + 1)
            elif rule == "borda":
                weight = Fraction(len(ranking) - pos)
            else:
                raise ValueError(rule)
            scores[tx] = scores.get(tx, Fraction(0)) + weight
    return scores
