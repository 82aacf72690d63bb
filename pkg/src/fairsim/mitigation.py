"""Ballot-based proposal ordering defense.

Each peer's endorsement counters induce a ranked ballot over the proposer's
pool: the transactions that peer endorsed, in counter order. A positional
voting rule (Dowdall by default, Borda as an alternative) then orders the
proposal instead of mempool FIFO. Scores use exact fractions so ties are
detected deterministically; ties fall back to the proposer's FIFO order.
"""

from dataclasses import dataclass
from fractions import Fraction

RULE_OFF = "off"
RULE_DOWDALL = "dowdall"
RULE_BORDA = "borda"
RULES = (RULE_OFF, RULE_DOWDALL, RULE_BORDA)


@dataclass(frozen=True)
class Ballot:
    peer: str
    ranking: tuple  # transaction ids, best first, possibly empty


def extract_ballots(pool, peer_ids) -> list:
    """One ballot per peer from the endorsements embedded in the pool.

    pool: iterable of EndorsedTransaction in proposer-FIFO order.
    Only forwarded endorsements are visible here, so ballots may cover just
    a subset of the pool and counter values may have gaps; duplicate counter
    values for one peer are impossible by construction and raise.
    """
    per_peer = {p: {} for p in peer_ids}
    for etx in pool:
        for e in etx.endorsements:
            slots = per_peer.get(e.peer)
            if slots is None:
                raise ValueError(f"endorsement from unknown peer {e.peer!r}")
            if e.counter_index in slots:
                raise ValueError(
                    f"peer {e.peer!r} has duplicate endorsement counter {e.counter_index}")
            slots[e.counter_index] = etx.tx.id
    ballots = []
    for p in peer_ids:
        slots = per_peer[p]
        ranking = tuple(slots[c] for c in sorted(slots))
        ballots.append(Ballot(p, ranking))
    return ballots


def _positional_scores(ballots, rule: str) -> dict:
    scores = {}
    if rule == RULE_DOWDALL:
        for ballot in ballots:
            for r, tx_id in enumerate(ballot.ranking, start=1):
                scores[tx_id] = scores.get(tx_id, 0) + Fraction(1, r)
    elif rule == RULE_BORDA:
        for ballot in ballots:
            length = len(ballot.ranking)
            for r, tx_id in enumerate(ballot.ranking, start=1):
                scores[tx_id] = scores.get(tx_id, 0) + (length - r + 1)
    else:
        raise ValueError(f"unknown voting rule {rule!r}")
    return scores


def order_by_vote(pool, ballots, rule: str) -> list:
    """Permutation of the pool's transaction ids by descending vote score.

    Unranked candidates score 0; ties (and the no-information case) keep the
    proposer-FIFO order of the pool.
    """
    candidates = [etx.tx.id for etx in pool]
    scores = _positional_scores(ballots, rule)
    fifo_index = {tx_id: i for i, tx_id in enumerate(candidates)}
    return sorted(candidates, key=lambda t: (-scores.get(t, 0), fifo_index[t]))
