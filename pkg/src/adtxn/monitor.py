"""Per-object monitor: admission, execution, release.

Every shared object runs its operations through a four-step discipline:

  (1) on arrival, try to *deduce* the result from already-executed
      operations; failing that, test in-parameter commutativity against
      everything admitted but unfinished and out-parameter commutativity
      against everything executed, and block on the conflicts;
  (2) wait until no conflict remains;
  (3) execute, exactly once;
  (4) publish the out-parameters and re-test the ops blocked on this one,
      since results often reveal commutativity that in-parameters alone
      could not (a failed pop conflicts with nothing).

Steps (1), (4) and the release operations (finish, withdraw) are entry
sections: each runs to completion before the next begins, and the
structural invariants below hold between any two of them. Step (3) is
deliberately outside: executions of commuting ops may overlap in a threaded
build. Under the cooperative scheduler used here a quantum never splits an
entry section, so the exclusion is the scheduler itself; the invariant
checker still runs after every section to keep the discipline honest.

Blocking is tracked as a bipartite ledger: `blocks[b]` holds the ids waiting
on b, `waiting_for[w]` counts w's remaining blockers. When the count hits
zero the op moves to in-execution immediately, inside the same entry section
that removed the last edge, so "blocked iff counted" is never observably
false. The caller is handed the list of newly admitted ops and owns waking
their transactions.

Conflicts are never recorded between operations of the same transaction:
transactions are sequential, so their own ops are already ordered and
self-blocking would deadlock on arrival. Deduction, by contrast, must
consider *all* executed ops including the transaction's own, because a
deduced answer has to be consistent with every result the state already
reflects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .core import (AdtSpec, Lifecycle, Origin, PrivateCall, PrivateInvocation,
                   check_outs)
from .tables import commute_with_in, commute_with_in_out, try_deduce
from .values import Value


class AdmitOutcome(Enum):
    ADMITTED = "admitted"    # runs now
    DEDUCED = "deduced"      # answered without running
    BLOCKED = "blocked"      # parked on conflicts


@dataclass(eq=False)
class ManagedObject:
    """One shared object plus its monitor bookkeeping."""
    name: str
    index: int
    spec: AdtSpec
    state: object
    strict: bool = True
    blocked: dict[int, PrivateInvocation] = field(default_factory=dict)
    in_execution: dict[int, PrivateInvocation] = field(default_factory=dict)
    executed: dict[int, PrivateInvocation] = field(default_factory=dict)
    waiting_for: dict[int, int] = field(default_factory=dict)
    blocks: dict[int, set[int]] = field(default_factory=dict)
    max_in_execution: int = 0

    # -- step (1): deduction, then in-control ------------------------------

    def admit(self, inv: PrivateInvocation) -> AdmitOutcome:
        assert inv.lifecycle is Lifecycle.NEW and inv.obj == self.name
        executed = [self.executed[i] for i in sorted(self.executed)]
        pending = ([self.blocked[i] for i in sorted(self.blocked)]
                   + [self.in_execution[i] for i in sorted(self.in_execution)])
        deduced = try_deduce(self.spec.tables, inv, executed, pending)
        if deduced is not None:
            check_outs(self.spec, inv.op, deduced)
            inv.outs = deduced
            inv.origin = Origin.DEDUCED
            inv.lifecycle = Lifecycle.EXECUTED
            self.executed[inv.id] = inv
            self._check()
            return AdmitOutcome.DEDUCED
        conflicts = set()
        for other in pending:
            if other.txn != inv.txn and not commute_with_in(self.spec.tables, other, inv):
                conflicts.add(other.id)
        for other in executed:
            if other.txn != inv.txn and \
                    not commute_with_in_out(self.spec.tables, other, inv).commutes:
                conflicts.add(other.id)
        if conflicts:
            inv.lifecycle = Lifecycle.BLOCKED
            self.blocked[inv.id] = inv
            self.waiting_for[inv.id] = len(conflicts)
            for b in conflicts:
                self.blocks.setdefault(b, set()).add(inv.id)
            self._check()
            return AdmitOutcome.BLOCKED
        self._enter_execution(inv)
        self._check()
        return AdmitOutcome.ADMITTED

    # -- step (3): the only forward mutation of object state ---------------

    def execute(self, inv: PrivateInvocation) -> tuple[Value, ...]:
        assert inv.lifecycle is Lifecycle.IN_EXECUTION
        inv.executions += 1
        assert inv.executions == 1, f"{inv!r} executed more than once"
        new_state, outs = self.spec.apply(self.state, inv.op, inv.ins)
        check_outs(self.spec, inv.op, outs)
        self.state = new_state
        return outs

    # -- step (4): out-control ----------------------------------------------

    def complete(self, inv: PrivateInvocation,
                 outs: tuple[Value, ...]) -> list[PrivateInvocation]:
        """Record results, move to executed, re-test this op's waiters.

        A waiter whose conflict was only pseudo (the results commute even
        though the in-params did not promise it) sheds that edge now.
        Returns the ops this admitted, in id order.
        """
        assert inv.lifecycle is Lifecycle.IN_EXECUTION
        inv.outs = outs
        del self.in_execution[inv.id]
        inv.lifecycle = Lifecycle.EXECUTED
        self.executed[inv.id] = inv
        woken = []
        for wid in sorted(self.blocks.get(inv.id, set())):
            waiter = self.blocked[wid]
            if commute_with_in_out(self.spec.tables, inv, waiter).commutes:
                self.blocks[inv.id].discard(wid)
                woken += self._shed_edge(waiter)
        if inv.id in self.blocks and not self.blocks[inv.id]:
            del self.blocks[inv.id]
        self._check()
        return woken

    # -- release: transaction outcome reached -------------------------------

    def finish(self, inv: PrivateInvocation) -> list[PrivateInvocation]:
        """Commit-or-reject for one executed op: drop every edge it holds."""
        assert inv.lifecycle is Lifecycle.EXECUTED
        del self.executed[inv.id]
        inv.lifecycle = Lifecycle.FINISHED
        woken = []
        for wid in sorted(self.blocks.pop(inv.id, set())):
            woken += self._shed_edge(self.blocked[wid])
        self._check()
        return woken

    def withdraw(self, inv: PrivateInvocation) -> list[PrivateInvocation]:
        """Remove a still-blocked op entirely (its transaction is aborting).

        Only Blocked ops can be withdrawn: once admitted, an op's effects
        exist and must be undone through its inverse instead.
        """
        assert inv.lifecycle is Lifecycle.BLOCKED
        del self.blocked[inv.id]
        del self.waiting_for[inv.id]
        woken = []
        for wid in sorted(self.blocks.pop(inv.id, set())):
            woken += self._shed_edge(self.blocked[wid])
        # then drop the edges that pointed at the withdrawn op itself
        for b in list(self.blocks):
            self.blocks[b].discard(inv.id)
            if not self.blocks[b]:
                del self.blocks[b]
        inv.lifecycle = Lifecycle.FINISHED
        self._check()
        return woken

    # -- undo path -----------------------------------------------------------

    def apply_inverse(self, call: PrivateCall) -> tuple[Value, ...]:
        """Run an inverse against the state, bypassing admission.

        Inverses are installed by the aborting transaction itself while it
        still holds every conflict edge its direct ops created, so admission
        would be vacuous; running them through it could even self-block.
        """
        new_state, outs = self.spec.apply(self.state, call.op, call.ins)
        check_outs(self.spec, call.op, outs)
        self.state = new_state
        return outs

    # -- internals ------------------------------------------------------------

    def _enter_execution(self, inv: PrivateInvocation):
        inv.lifecycle = Lifecycle.IN_EXECUTION
        self.in_execution[inv.id] = inv
        self.max_in_execution = max(self.max_in_execution, len(self.in_execution))
        if self.strict:
            self._admission_safety(inv)

    def _shed_edge(self, waiter: PrivateInvocation) -> list[PrivateInvocation]:
        self.waiting_for[waiter.id] -= 1
        if self.waiting_for[waiter.id] > 0:
            return []
        del self.waiting_for[waiter.id]
        del self.blocked[waiter.id]
        self._enter_execution(waiter)
        return [waiter]

    def find_invocation(self, inv_id: int) -> PrivateInvocation:
        for pool in (self.blocked, self.in_execution, self.executed):
            if inv_id in pool:
                return pool[inv_id]
        raise KeyError(inv_id)

    def _admission_safety(self, inv: PrivateInvocation):
        # Entering execution must be conflict-free right now, not just at
        # whatever moment the edges were recorded.
        for other in self.in_execution.values():
            if other is inv or other.txn == inv.txn:
                continue
            assert commute_with_in(self.spec.tables, other, inv), \
                f"{inv!r} admitted against conflicting {other!r}"
        for other in self.executed.values():
            if other.txn == inv.txn:
                continue
            assert commute_with_in_out(self.spec.tables, other, inv).commutes, \
                f"{inv!r} admitted against conflicting executed {other!r}"

    def check_invariants(self):
        self._check(force=True)

    def _check(self, force: bool = False):
        if not (self.strict or force):
            return
        b, x, e = set(self.blocked), set(self.in_execution), set(self.executed)
        assert not (b & x or b & e or x & e), f"{self.name}: partition overlap"
        for pool, life in ((self.blocked, Lifecycle.BLOCKED),
                           (self.in_execution, Lifecycle.IN_EXECUTION),
                           (self.executed, Lifecycle.EXECUTED)):
            for iid, inv in pool.items():
                assert inv.id == iid and inv.lifecycle is life, f"{inv!r} misfiled"
        assert set(self.waiting_for) == b, f"{self.name}: counts vs blocked drift"
        indegree = {w: 0 for w in b}
        live = b | x | e
        for blocker, waiters in self.blocks.items():
            assert blocker in live, f"{self.name}: edges from dead op {blocker}"
            for w in waiters:
                assert w in b, f"{self.name}: edge to non-blocked {w}"
                assert blocker < w, f"{self.name}: edge {blocker}->{w} not forward"
                indegree[w] += 1
        for w, n in self.waiting_for.items():
            assert n > 0 and n == indegree[w], \
                f"{self.name}: waiting_for[{w}]={n} vs indegree {indegree[w]}"
        for inv in self.executed.values():
            assert inv.outs is not None
            expect = 0 if inv.origin is Origin.DEDUCED else 1
            assert inv.executions == expect, f"{inv!r} execution count"
        for inv in self.blocked.values():
            assert inv.outs is None and inv.executions == 0
        for inv in self.in_execution.values():
            assert inv.outs is None
