"""Simplified Tendermint-style ordering service.

Rotating proposer (height + round) mod n', PROPOSE/PREVOTE/PRECOMMIT phases
with a constant per-phase timeout, > 2f' vote thresholds, FIFO mempools (or
ballot-vote ordering when the mitigation is enabled). Locking and timeout
escalation are deliberately omitted: the modeled adversary censors or
withholds but never equivocates. Vote tallies are kept per (height, round)
even after a node moves on, so a lagging node still commits once enough
matching PRECOMMITs for any round of its current height have arrived.
"""

from dataclasses import dataclass

from .mitigation import RULE_OFF, extract_ballots, order_by_vote
from .endorsing import ENDORSED_TX

PROPOSAL = "proposal"
PREVOTE = "prevote"
PRECOMMIT = "precommit"
TIMER = "timer"

PHASE_PROPOSE = 0
PHASE_PREVOTE = 1
PHASE_PRECOMMIT = 2

# messages this far above the current height are dropped instead of buffered
HEIGHT_HORIZON = 1000


def select_proposer(height: int, round_: int, n_prime: int) -> int:
    """Round-robin proposer index over heights and rounds."""
    return (height + round_) % n_prime


@dataclass(frozen=True)
class Block:
    height: int
    round: int
    proposer: str
    txs: tuple          # transaction ids in delivery order
    committed_at: int


@dataclass(frozen=True)
class ConsensusParams:
    n_prime: int
    endorse_quorum: int
    phase_timeout: int
    vote_rule: str = RULE_OFF
    allow_empty_blocks: bool = True

    @property
    def f_prime(self) -> int:
        return (self.n_prime - 1) // 3


class Proposal:
    __slots__ = ("height", "round", "proposer", "txs", "_valid")

    def __init__(self, height, round_, proposer, txs):
        self.height = height
        self.round = round_
        self.proposer = proposer
        self.txs = txs
        self._valid = None  # validity verdict cached across receivers


class _RoundState:
    __slots__ = ("proposal", "prevotes", "precommits", "prevote_yes", "precommit_yes")

    def __init__(self):
        self.proposal = None
        self.prevotes = {}    # voter -> bool
        self.precommits = {}  # voter -> bool
        self.prevote_yes = 0
        self.precommit_yes = 0


class Orderer:
    """One consensus participant with its own mempool and chain."""

    def __init__(self, oid: str, index: int, engine, network, params: ConsensusParams,
                 orderer_ids, peer_ids, reception_log: list, commit_sink):
        self.id = oid
        self.index = index
        self.engine = engine
        self.network = network
        self.params = params
        self.two_f = 2 * params.f_prime
        self.orderer_ids = tuple(orderer_ids)
        self.others = tuple(o for o in orderer_ids if o != oid)
        self.peer_ids = tuple(peer_ids)
        self.reception_log = reception_log
        self.commit_sink = commit_sink

        self.mempool = {}        # tx id -> EndorsedTransaction, arrival order
        self.committed_ids = set()
        self.chain = []
        self.height = 0
        self.round = 0
        self.phase = PHASE_PROPOSE
        self.rounds = {}         # (height, round) -> _RoundState
        self._timer_epoch = 0

        self.censor_clients = set()
        self.withhold_clients = set()

        network.register(oid, ENDORSED_TX, self.on_endorsed_tx)
        network.register(oid, PROPOSAL, self.on_proposal)
        network.register(oid, PREVOTE, self.on_prevote)
        network.register(oid, PRECOMMIT, self.on_precommit)

    def start(self):
        self._enter_round(0, 0)

    # ------------------------------------------------------------------
    # mempool

    def on_endorsed_tx(self, etx):
        tx_id = etx.tx.id
        self.reception_log.append(tx_id)
        if tx_id in self.committed_ids or tx_id in self.mempool:
            return
        self.mempool[tx_id] = etx

    # ------------------------------------------------------------------
    # proposals

    def build_proposal(self, height: int, round_: int) -> Proposal:
        pool = list(self.mempool.values())
        if self.params.vote_rule != RULE_OFF and pool:
            ballots = extract_ballots(pool, self.peer_ids)
            order = order_by_vote(pool, ballots, self.params.vote_rule)
            pool = [self.mempool[t] for t in order]
        if self.censor_clients:
            censor = self.censor_clients
            pool = [e for e in pool if e.tx.client not in censor]
        return Proposal(height, round_, self.id, tuple(pool))

    def _proposal_valid(self, prop: Proposal) -> bool:
        verdict = prop._valid
        if verdict is None:
            q = self.params.endorse_quorum
            verdict = all(
                len({e.peer for e in etx.endorsements}) >= q for etx in prop.txs)
            prop._valid = verdict
        return verdict

    def on_proposal(self, prop: Proposal):
        h = prop.height
        if h < self.height or h > self.height + HEIGHT_HORIZON:
            return
        st = self._round(h, prop.round)
        if st.proposal is not None:
            return  # single proposer per round; duplicates are impossible
        st.proposal = prop
        if h != self.height:
            return
        if st.precommit_yes > self.two_f:
            # the network already agreed; the proposal was the missing piece
            self._commit(h, prop.round, st)
            return
        if prop.round != self.round:
            return
        if self.phase == PHASE_PROPOSE:
            self._consider_proposal(st)
        elif (self.phase == PHASE_PREVOTE and st.prevote_yes > self.two_f
                and self._proposal_valid(prop)):
            self._broadcast_precommit(st, self._vote_value(prop))

    def _vote_value(self, prop: Proposal) -> bool:
        """Honest orderers vote for the proposal; a vote-withholding orderer
        votes NIL whenever it contains a withheld client's transaction."""
        if self.withhold_clients:
            withhold = self.withhold_clients
            for etx in prop.txs:
                if etx.tx.client in withhold:
                    return False
        return True

    def _consider_proposal(self, st: _RoundState):
        """First valid proposal of the current round determines our prevote."""
        prop = st.proposal
        if not self._proposal_valid(prop):
            return  # keep waiting; the propose timer will vote NIL
        self._broadcast_prevote(st, self._vote_value(prop))

    # ------------------------------------------------------------------
    # votes

    def on_prevote(self, vote):
        h, r, value, voter = vote
        if h < self.height or h > self.height + HEIGHT_HORIZON:
            return
        st = self._round(h, r)
        if voter in st.prevotes:
            return
        st.prevotes[voter] = value
        if value:
            st.prevote_yes += 1
            if (h == self.height and r == self.round
                    and self.phase == PHASE_PREVOTE
                    and st.prevote_yes > self.two_f
                    and st.proposal is not None
                    and self._proposal_valid(st.proposal)):
                self._broadcast_precommit(st, self._vote_value(st.proposal))

    def on_precommit(self, vote):
        h, r, value, voter = vote
        if h < self.height or h > self.height + HEIGHT_HORIZON:
            return
        st = self._round(h, r)
        if voter in st.precommits:
            return
        st.precommits[voter] = value
        if value:
            st.precommit_yes += 1
            # commits accept any round of the current height (catch-up)
            if (h == self.height and st.precommit_yes > self.two_f
                    and st.proposal is not None):
                self._commit(h, r, st)

    def _broadcast_prevote(self, st: _RoundState, value: bool):
        self.phase = PHASE_PREVOTE
        self._schedule_timer()
        me = self.id
        st.prevotes[me] = value
        if value:
            st.prevote_yes += 1
        msg = (self.height, self.round, value, me)
        self.network.broadcast(me, self.others, PREVOTE, msg)
        if (st.prevote_yes > self.two_f and st.proposal is not None
                and self._proposal_valid(st.proposal)):
            self._broadcast_precommit(st, self._vote_value(st.proposal))

    def _broadcast_precommit(self, st: _RoundState, value: bool):
        self.phase = PHASE_PRECOMMIT
        self._schedule_timer()
        me = self.id
        st.precommits[me] = value
        if value:
            st.precommit_yes += 1
        msg = (self.height, self.round, value, me)
        self.network.broadcast(me, self.others, PRECOMMIT, msg)
        if st.precommit_yes > self.two_f and st.proposal is not None:
            self._commit(self.height, self.round, st)

    # ------------------------------------------------------------------
    # round and height progression

    def _round(self, h: int, r: int) -> _RoundState:
        key = (h, r)
        st = self.rounds.get(key)
        if st is None:
            st = _RoundState()
            self.rounds[key] = st
        return st

    def _schedule_timer(self):
        self._timer_epoch += 1
        self.engine.schedule(self.engine.now + self.params.phase_timeout,
                             TIMER, self._on_timer, self._timer_epoch)

    def _on_timer(self, epoch: int):
        if epoch != self._timer_epoch:
            return
        if self.phase == PHASE_PROPOSE:
            # no valid proposal arrived in time
            self._broadcast_prevote(self._round(self.height, self.round), False)
        elif self.phase == PHASE_PREVOTE:
            self._broadcast_precommit(self._round(self.height, self.round), False)
        else:
            self._enter_round(self.height, self.round + 1)

    def _enter_round(self, h: int, r: int):
        self.height = h
        self.round = r
        self.phase = PHASE_PROPOSE
        self._schedule_timer()
        ready = self._ready_commit(h)
        if ready is not None:
            self._commit(h, ready[0], ready[1])
            return
        st = self._round(h, r)
        if st.proposal is None and select_proposer(h, r, self.params.n_prime) == self.index:
            if self.mempool or self.params.allow_empty_blocks:
                prop = self.build_proposal(h, r)
                st.proposal = prop
                self.network.broadcast(self.id, self.others, PROPOSAL, prop)
        if st.proposal is not None:
            self._consider_proposal(st)

    def _ready_commit(self, h: int):
        """Lowest stored round of height h whose precommit tally and proposal
        already allow an immediate commit."""
        best = None
        for (hh, rr), st in self.rounds.items():
            if hh == h and st.precommit_yes > self.two_f and st.proposal is not None:
                if best is None or rr < best[0]:
                    best = (rr, st)
        return best

    def _commit(self, h: int, r: int, st: _RoundState):
        while True:
            prop = st.proposal
            tx_ids = []
            pop = self.mempool.pop
            add = self.committed_ids.add
            for etx in prop.txs:
                tx_id = etx.tx.id
                tx_ids.append(tx_id)
                add(tx_id)
                pop(tx_id, None)
            block = Block(h, r, prop.proposer, tuple(tx_ids), self.engine.now)
            self.chain.append(block)
            self.commit_sink(self.id, block)
            self.rounds = {k: v for k, v in self.rounds.items() if k[0] > h}
            h += 1
            ready = self._ready_commit(h)
            if ready is None:
                break
            r, st = ready
        self._enter_round(h, 0)
