"""Transaction manager driven by hand: strictness, undo, wakes, deadlocks.

perform() is a generator; these tests step it directly instead of going
through the scheduler, which pins the protocol a scheduler must follow.
"""

from fractions import Fraction

import pytest

from adtxn import history as hist
from adtxn.adts import get_adt
from adtxn.core import Lifecycle, PublicCall
from adtxn.manager import (
    TransactionAborted,
    TransactionManager,
    TxnStatus,
    find_cycle,
)
from adtxn.values import item, rational, report

OK = report("Ok")


def start(mgr, rec, obj, op, *ins):
    """Issue a call; returns ("done", outs) or ("wait", gen, inv)."""
    gen = mgr.perform(rec, obj, PublicCall(op, tuple(ins)))
    try:
        step = next(gen)
    except StopIteration as stop:
        return ("done", stop.value)
    kind, inv = step
    assert kind == "wait"
    return ("wait", gen, inv)


def finish_wait(gen):
    try:
        gen.send(None)
    except StopIteration as stop:
        return stop.value
    raise AssertionError("perform yielded twice")


def run_op(mgr, rec, obj, op, *ins):
    got = start(mgr, rec, obj, op, *ins)
    assert got[0] == "done", f"{op} unexpectedly blocked"
    return got[1]


def kinds(mgr):
    return [e.kind for e in mgr.history]


# ---------------------------------------------------------------- basic flow

def test_two_phase_visibility():
    mgr = TransactionManager()
    mgr.add_object("s", get_adt("stack"))
    t1, t2 = mgr.begin("T1"), mgr.begin("T2")
    assert run_op(mgr, t1, "s", "PUSH", item("a")) == (OK,)
    got = start(mgr, t2, "s", "POP")
    assert got[0] == "wait"
    mgr.commit(t1)
    assert t1.status is TxnStatus.COMMITTED
    # the wake cleared blocked_on before the waiter even resumed
    assert t2.blocked_on is None
    assert finish_wait(got[1]) == (item("a"), OK)
    mgr.commit(t2)
    assert [o.outs for o in t2.observations] == [(item("a"), OK)]


def test_null_direct_op_has_no_footprint():
    mgr = TransactionManager()
    mgr.add_object("r", get_adt("real"), Fraction(5))
    t1 = mgr.begin("T1")
    assert run_op(mgr, t1, "r", "MULTIPLY", rational(1)) == ()
    assert t1.invocations == [] and t1.undo == []
    assert kinds(mgr) == [hist.BEGIN, hist.NULLOP]
    assert t1.observations[0].op == "MULTIPLY"
    mgr.commit(t1)


def test_abort_undoes_across_objects_in_reverse():
    mgr = TransactionManager()
    mgr.add_object("s", get_adt("stack"), ("x",))
    mgr.add_object("r", get_adt("real"), Fraction(10))
    t1 = mgr.begin("T1")
    run_op(mgr, t1, "s", "PUSH", item("a"))
    run_op(mgr, t1, "r", "ADD", rational(7))
    run_op(mgr, t1, "s", "POP")
    run_op(mgr, t1, "s", "POP")
    mgr.abort(t1)
    assert t1.status is TxnStatus.ABORTED
    assert mgr.objects["s"].state == ("x",)
    assert mgr.objects["r"].state == Fraction(10)
    inverses = [(e.obj, e.op) for e in mgr.history if e.kind == hist.INVERSE]
    # undo log runs backwards: the last pop goes back first
    assert inverses == [("s", "PUSH"), ("s", "PUSH"), ("r", "SUB"), ("s", "POP")]


def test_deduced_ops_hold_their_edges_until_release():
    mgr = TransactionManager()
    mgr.add_object("s", get_adt("stack"))
    t1, t2, t3 = mgr.begin("T1"), mgr.begin("T2"), mgr.begin("T3")
    run_op(mgr, t1, "s", "EMPTY")
    run_op(mgr, t2, "s", "POP")             # deduced from T1's answer
    assert mgr.history.count(hist.DEDUCE) == 1
    assert t2.undo == []                    # deduced: nothing to undo
    got = start(mgr, t3, "s", "PUSH", item("a"))
    assert got[0] == "wait"
    obj = mgr.objects["s"]
    assert obj.waiting_for[got[2].id] == 2  # blocked by the probe and the pop
    mgr.commit(t1)
    assert got[2].lifecycle is Lifecycle.BLOCKED
    mgr.commit(t2)                          # deduced op released here
    assert finish_wait(got[1]) == (OK,)
    mgr.commit(t3)


def test_withdraw_on_abort_of_a_blocked_transaction():
    mgr = TransactionManager()
    mgr.add_object("s", get_adt("stack"))
    t1, t2 = mgr.begin("T1"), mgr.begin("T2")
    run_op(mgr, t1, "s", "PUSH", item("a"))
    got = start(mgr, t2, "s", "POP")
    assert got[0] == "wait"
    mgr.abort(t2)
    tail = kinds(mgr)[-2:]
    assert tail == [hist.ABORT, hist.WITHDRAW]
    assert mgr.history.count(hist.INVERSE) == 0
    assert mgr.objects["s"].blocked == {}
    mgr.commit(t1)


def test_commit_refused_while_blocked_or_settled():
    mgr = TransactionManager()
    mgr.add_object("s", get_adt("stack"))
    t1, t2 = mgr.begin("T1"), mgr.begin("T2")
    run_op(mgr, t1, "s", "PUSH", item("a"))
    got = start(mgr, t2, "s", "POP")
    assert got[0] == "wait"
    with pytest.raises(AssertionError):
        mgr.commit(t2)                      # still parked
    mgr.abort(t2)
    with pytest.raises(AssertionError):
        mgr.commit(t2)                      # already aborted
    mgr.commit(t1)


# ------------------------------------------------------------------ deadlock

def cross_push(mgr):
    """T1 holds A and wants B; T2 holds B and wants A."""
    mgr.add_object("A", get_adt("stack"))
    mgr.add_object("B", get_adt("stack"))
    t1, t2 = mgr.begin("T1"), mgr.begin("T2")
    run_op(mgr, t1, "A", "PUSH", item("a"))
    run_op(mgr, t2, "B", "PUSH", item("b"))
    return t1, t2


def test_deadlock_victim_is_the_youngest_and_raises_in_its_own_flow():
    mgr = TransactionManager()
    t1, t2 = cross_push(mgr)
    got = start(mgr, t1, "B", "PUSH", item("c"))
    assert got[0] == "wait"
    gen = mgr.perform(t2, "A", PublicCall("PUSH", (item("d"),)))
    with pytest.raises(TransactionAborted):
        next(gen)
    assert t2.status is TxnStatus.ABORTED
    assert mgr.history.count(hist.VICTIM) == 1
    assert next(e.txn for e in mgr.history if e.kind == hist.VICTIM) == "T2"
    assert mgr.objects["B"].state == ()     # T2's push rolled back
    assert finish_wait(got[1]) == (OK,)     # T1 was woken by the rollback
    mgr.commit(t1)
    assert mgr.objects["B"].state == ("c",)


def test_deadlock_closed_by_the_survivor_never_parks_it():
    # T2 blocks first; T1's own call closes the cycle, T2 dies, and T1's
    # perform must notice it was admitted during resolution and skip the wait.
    mgr = TransactionManager()
    t1, t2 = cross_push(mgr)
    got = start(mgr, t2, "A", "PUSH", item("d"))
    assert got[0] == "wait"
    result = start(mgr, t1, "B", "PUSH", item("c"))
    assert result[0] == "done" and result[1] == (OK,)
    assert t2.status is TxnStatus.ABORTED
    assert got[2].lifecycle is Lifecycle.FINISHED   # withdrawn, not admitted
    got[1].close()     # the scheduler would throw into it; see the next test
    mgr.commit(t1)


def test_victims_generator_sees_the_abort_when_resumed():
    # When the loser is parked, resuming its generator must raise inside it.
    mgr = TransactionManager()
    t1, t2 = cross_push(mgr)
    got = start(mgr, t2, "A", "PUSH", item("d"))
    start(mgr, t1, "B", "PUSH", item("c"))
    with pytest.raises(TransactionAborted):
        got[1].throw(TransactionAborted(t2.name))


# ------------------------------------------------------------- graph plumbing

def test_waits_for_edges_derive_from_the_monitors():
    mgr = TransactionManager()
    mgr.add_object("s", get_adt("stack"))
    t1, t2, t3 = mgr.begin("T1"), mgr.begin("T2"), mgr.begin("T3")
    run_op(mgr, t1, "s", "PUSH", item("a"))
    assert start(mgr, t2, "s", "POP")[0] == "wait"
    assert start(mgr, t3, "s", "EMPTY")[0] == "wait"
    assert mgr.waits_for_edges() == {t2.id: {t1.id}, t3.id: {t1.id, t2.id}}


def test_find_cycle():
    assert find_cycle({}) is None
    assert find_cycle({1: {2}, 2: {3}}) is None
    assert find_cycle({1: {2}, 2: {3}, 3: {1}}) == [1, 2, 3]
    assert find_cycle({1: {1}}) == [1]
    assert find_cycle({2: {1}, 1: {2}}) == [1, 2]
    # only the reachable cycle comes back
    assert find_cycle({1: {2}, 3: {4}, 4: {3}}) == [3, 4]
