"""Endorsement layer.

Clients broadcast endorse requests to every peer; peers endorse in arrival
order, piggybacking a local counter; once a client holds a quorum of
endorsements from distinct peers it forwards the transaction, with exactly
the first q endorsements received, to every orderer, once.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

ENDORSE_REQUEST = "endorse_req"
ENDORSEMENT = "endorse_resp"
ENDORSED_TX = "endorsed_tx"

HEARTBEAT = -1  # puzzle field value marking background heartbeat traffic


@dataclass(frozen=True)
class Transaction:
    id: str
    client: str
    puzzle: int        # puzzle number, or HEARTBEAT
    created_at: int


@dataclass(frozen=True)
class Endorsement:
    peer: str
    tx_id: str
    counter_index: int  # peer-local endorsement sequence number
    endorsed_at: int


@dataclass(frozen=True)
class EndorsementPolicy:
    quorum: int
    total_peers: int

    def __post_init__(self):
        if not 1 <= self.quorum <= self.total_peers:
            raise ValueError(f"quorum {self.quorum} outside [1, {self.total_peers}]")


@dataclass(frozen=True)
class EndorsedTransaction:
    tx: Transaction
    endorsements: tuple  # first q endorsements in arrival order, distinct peers


def endorsement_probability(n: int, b: int, q: int, x: float) -> float:
    """Probability that a transaction reaches q distinct endorsements when b
    of the n peers refuse it and each remaining peer endorses independently
    with probability x. Pure analysis aid.

    The tail sum runs in exact rational arithmetic (floats are rationals, so
    the conversion is lossless) and rounds once at the end."""
    if not 0 <= b <= n:
        raise ValueError("need 0 <= b <= n")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x is a probability")
    honest = n - b
    if q > honest:
        return 0.0
    fx = Fraction(x)
    total = Fraction(0)
    for k in range(q, honest + 1):
        total += math.comb(honest, k) * fx**k * (1 - fx) ** (honest - k)
    return float(total)


class Peer:
    """Endorses every request in arrival order unless sabotaged against the
    requesting client; receptions are logged either way."""

    def __init__(self, pid: str, engine, network, reception_log: list):
        self.id = pid
        self.engine = engine
        self.network = network
        self.reception_log = reception_log
        self.counter = 0
        self.sabotage_clients = set()
        network.register(pid, ENDORSE_REQUEST, self.on_request)

    def on_request(self, tx: Transaction):
        self.reception_log.append(tx.id)
        if tx.client in self.sabotage_clients:
            return
        e = Endorsement(self.id, tx.id, self.counter, self.engine.now)
        self.counter += 1
        self.network.send(self.id, tx.client, ENDORSEMENT, e)


class Client:
    """Submits transactions and forwards the first quorum of endorsements."""

    def __init__(self, cid: str, engine, network, peer_ids, orderer_ids,
                 policy: EndorsementPolicy, send_log: dict, competing: bool = True):
        self.id = cid
        self.engine = engine
        self.network = network
        self.peer_ids = tuple(peer_ids)
        self.orderer_ids = tuple(orderer_ids)
        self.policy = policy
        self.send_log = send_log
        self.competing = competing
        self._pending = {}   # tx id -> (tx, endorsements so far)
        self._seen = set()   # every id ever submitted
        network.register(cid, ENDORSEMENT, self.on_endorsement)

    def submit(self, tx: Transaction):
        if tx.id in self._seen:
            raise ValueError(f"duplicate transaction id {tx.id!r}")
        self._seen.add(tx.id)
        self.send_log[tx.id] = self.engine.now
        self._pending[tx.id] = (tx, [])
        send = self.network.send
        for p in self.peer_ids:
            send(self.id, p, ENDORSE_REQUEST, tx)

    def on_endorsement(self, e: Endorsement):
        entry = self._pending.get(e.tx_id)
        if entry is None:
            return  # already forwarded or unknown; late endorsements are ignored
        tx, collected = entry
        collected.append(e)
        if len(collected) == self.policy.quorum:
            del self._pending[e.tx_id]
            etx = EndorsedTransaction(tx, tuple(collected))
            send = self.network.send
            for o in self.orderer_ids:
                send(self.id, o, ENDORSED_TX, etx)
