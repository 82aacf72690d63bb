"""Ordering service: proposer rotation, commits, censorship, vote withholding."""

import dataclasses

from fairsim.ordering import select_proposer, Proposal, HEIGHT_HORIZON
from fairsim.endorsing import Transaction, Endorsement, EndorsedTransaction
from conftest import StagedWorld, staged_two_tx_scenario


def make_etx(tx_id, client, peers, when=0, puzzle=0):
    tx = Transaction(tx_id, client, puzzle, when)
    ends = tuple(Endorsement(p, tx_id, i, when) for i, p in enumerate(peers))
    return EndorsedTransaction(tx, ends)


def quiet(world):
    """Stop orderers from proposing empty blocks so chains stay readable."""
    for o in world.orderers.values():
        o.params = dataclasses.replace(o.params, allow_empty_blocks=False)


def start_all(world):
    for o in world.orderers.values():
        o.start()


# ---------------------------------------------------------------------------
# proposer rotation

def test_proposer_rotation_examples():
    assert select_proposer(0, 0, 4) == 0
    assert select_proposer(1, 0, 4) == 1
    assert select_proposer(1, 3, 4) == 0
    assert select_proposer(7, 2, 4) == 1


def test_proposer_rotation_is_fair_across_heights():
    n_prime = 4
    chosen = [select_proposer(h, 0, n_prime) for h in range(3 * n_prime)]
    for index in range(n_prime):
        assert chosen.count(index) == 3


# ---------------------------------------------------------------------------
# proposal construction and validity

def test_build_proposal_preserves_mempool_fifo():
    world = StagedWorld()
    o1 = world.orderers["o1"]
    for tx_id in ("a", "b", "c"):
        o1.on_endorsed_tx(make_etx(tx_id, "cA", ["p1", "p2", "p3"]))
    prop = o1.build_proposal(0, 0)
    assert [e.tx.id for e in prop.txs] == ["a", "b", "c"]


def test_censor_filter_drops_target_and_keeps_order():
    world = StagedWorld()
    o1 = world.orderers["o1"]
    for tx_id, client in (("a", "cA"), ("b", "cB"), ("c", "cA"), ("d", "cB")):
        o1.on_endorsed_tx(make_etx(tx_id, client, ["p1", "p2", "p3"]))
    o1.censor_clients.add("cA")
    prop = o1.build_proposal(0, 0)
    assert [e.tx.id for e in prop.txs] == ["b", "d"]


def test_mempool_ignores_duplicates_and_committed_ids():
    world = StagedWorld()
    o1 = world.orderers["o1"]
    etx = make_etx("z1", "cA", ["p1", "p2", "p3"])
    o1.on_endorsed_tx(etx)
    o1.on_endorsed_tx(etx)
    assert list(o1.mempool) == ["z1"]
    assert world.logs.orderer_logs["o1"] == ["z1", "z1"]  # receptions still logged
    o1.committed_ids.add("z2")
    o1.on_endorsed_tx(make_etx("z2", "cA", ["p1", "p2", "p3"]))
    assert "z2" not in o1.mempool


def test_proposal_validity_needs_distinct_quorum_per_transaction():
    world = StagedWorld()  # quorum 3
    o1 = world.orderers["o1"]
    good = make_etx("g1", "cA", ["p1", "p2", "p3"])
    bad = make_etx("b1", "cA", ["p1", "p1", "p2"])  # only two distinct peers
    assert o1._proposal_valid(Proposal(0, 0, "o1", (good,)))
    assert not o1._proposal_valid(Proposal(0, 0, "o1", (bad,)))
    assert not o1._proposal_valid(Proposal(0, 0, "o1", (good, bad)))
    assert o1._proposal_valid(Proposal(0, 0, "o1", ()))


def test_far_future_and_stale_proposals_are_dropped():
    world = StagedWorld()
    o1 = world.orderers["o1"]
    far = Proposal(HEIGHT_HORIZON + 1, 0, "o2", ())
    o1.on_proposal(far)
    assert (HEIGHT_HORIZON + 1, 0) not in o1.rounds
    o1.height = 5
    o1.on_proposal(Proposal(3, 0, "o2", ()))
    assert (3, 0) not in o1.rounds


# ---------------------------------------------------------------------------
# consensus runs

def test_single_transaction_commits_identically_everywhere():
    world = StagedWorld(num_orderers=4, quorum=2)
    world.submit("cA", "x1")
    world.engine.run_until(10)
    quiet(world)
    start_all(world)
    world.engine.run_until(5000)
    for o in world.orderers.values():
        assert [b.txs for b in o.chain] == [("x1",)]
        assert o.chain[0].height == 0
        assert o.chain[0].proposer == "o1"
    assert len(world.commits) == 4


def test_empty_blocks_keep_the_chain_growing():
    world = StagedWorld(num_orderers=4)
    start_all(world)
    world.engine.run_until(3000)
    for o in world.orderers.values():
        assert len(o.chain) >= 2
        assert all(b.txs == () for b in o.chain)
        assert [b.height for b in o.chain] == list(range(len(o.chain)))


def test_commit_order_follows_the_proposers_fifo():
    world = staged_two_tx_scenario("off")
    quiet(world)
    start_all(world)
    world.engine.run_until(2000)
    for o in world.orderers.values():
        assert [b.txs for b in o.chain] == [("x2", "x1")]


def test_censoring_proposer_only_delays_the_target():
    world = StagedWorld(num_orderers=4, quorum=2)
    world.orderers["o1"].censor_clients.add("cA")
    world.submit("cA", "x1")
    world.submit("cB", "x2")
    world.engine.run_until(10)
    quiet(world)
    start_all(world)
    world.engine.run_until(8000)
    for o in world.orderers.values():
        assert [b.txs for b in o.chain] == [("x2",), ("x1",)]
        assert o.chain[1].proposer == "o2"  # the next, honest proposer
        assert o.committed_ids == {"x1", "x2"}


def test_single_withholder_cannot_block_a_commit():
    world = StagedWorld(num_orderers=4, quorum=2)
    world.orderers["o2"].withhold_clients.add("cA")
    world.submit("cA", "x1")
    world.engine.run_until(10)
    quiet(world)
    start_all(world)
    world.engine.run_until(8000)
    for o in world.orderers.values():
        assert [b.txs for b in o.chain] == [("x1",)]


def test_two_withholders_stall_the_height_and_burn_rounds():
    world = StagedWorld(num_orderers=4, quorum=2)
    for oid in ("o2", "o3"):
        world.orderers[oid].withhold_clients.add("cA")
    world.submit("cA", "x1")
    world.engine.run_until(10)
    for o in world.orderers.values():
        o.params = dataclasses.replace(o.params, phase_timeout=200)
    start_all(world)
    world.engine.run_until(12_000)
    for o in world.orderers.values():
        assert o.height == 0
        assert o.round >= 2
        assert o.chain == []
        assert "x1" in o.mempool


def test_commit_removes_transactions_from_the_mempool():
    world = StagedWorld(num_orderers=4, quorum=2)
    world.submit("cA", "x1")
    world.engine.run_until(10)
    quiet(world)
    start_all(world)
    world.engine.run_until(5000)
    for o in world.orderers.values():
        assert o.mempool == {}
        assert o.committed_ids == {"x1"}
