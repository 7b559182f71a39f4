"""Transactions over monitored objects: strict two-phase locking by conflict.

There are no locks to acquire by name. A transaction implicitly "holds" the
conflict edges its executed operations induce, and it holds every one of
them until a single release point: commit or abort. That is strictness, and
it is why no transaction ever reads state an aborter will rewind (aborting
rewrites only its own executed effects, which strictness kept fenced) and
why cascading rollback cannot occur.

Aborting runs the undo log backwards. Each executed operation recorded its
inverse at registration time, chosen from its own results; NULL inverses
(the op turned out to change nothing) are not logged at all but their
invocations still hold edges and are released at the end. Inverses are
applied straight to the object, bypassing admission: the aborter still owns
every conflict its direct ops created, so admission could only be vacuous
or, worse, self-blocking. Each direct op is released immediately after its
inverse lands, never before.

Deadlock is handled at block time. The waits-for graph is derived on demand
from the monitors' edge ledgers, and the youngest transaction on a cycle
(the largest id, the one with the least work behind it) is aborted outright;
this repeats until the graph is acyclic, so a blocked transaction sleeps
only on live, cycle-free waits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import count

from . import history as hist
from .core import (AdtSpec, FrameworkError, Lifecycle, Origin, PrivateCall,
                   PrivateInvocation, PublicCall, determine_inverse,
                   public_outs_from_private, translate_public)
from .history import History
from .monitor import AdmitOutcome, ManagedObject
from .values import Value


class TransactionAborted(FrameworkError):
    """Raised inside a transaction's own control flow when it loses a
    deadlock resolution."""


class TxnStatus(Enum):
    ACTIVE = "active"
    COMMITTING = "committing"
    COMMITTED = "committed"
    ABORTING = "aborting"
    ABORTED = "aborted"


@dataclass(frozen=True)
class Observation:
    """One public call and the answer its transaction saw."""
    obj: str
    op: str
    ins: tuple[Value, ...]
    outs: tuple[Value, ...]


@dataclass(frozen=True)
class UndoEntry:
    obj: ManagedObject
    inv: PrivateInvocation
    call: PrivateCall


@dataclass(eq=False)
class TransactionRecord:
    id: int
    name: str
    status: TxnStatus = TxnStatus.ACTIVE
    invocations: list = field(default_factory=list)   # (ManagedObject, inv)
    undo: list = field(default_factory=list)          # UndoEntry, execution order
    blocked_on: tuple | None = None                   # (ManagedObject, inv)
    observations: list = field(default_factory=list)


def find_cycle(adj: dict[int, set[int]]) -> list[int] | None:
    """First cycle under deterministic DFS order, as a node list."""
    nodes = sorted(set(adj) | {v for vs in adj.values() for v in vs})
    color = {n: 0 for n in nodes}
    path: list[int] = []

    def visit(u):
        color[u] = 1
        path.append(u)
        for v in sorted(adj.get(u, ())):
            if color[v] == 1:
                return path[path.index(v):]
            if color[v] == 0:
                found = visit(v)
                if found is not None:
                    return found
        color[u] = 2
        path.pop()
        return None

    for n in nodes:
        if color[n] == 0:
            found = visit(n)
            if found is not None:
                return found
    return None


class TransactionManager:
    """Owns the objects, the transactions and the event stream.

    `on_wake(txn_id)` fires when a blocked transaction's operation is
    admitted; `on_abort(txn_id)` fires after a transaction finishes
    aborting. A scheduler uses them to mark coroutines runnable or dead;
    both are optional for direct use in tests.
    """

    def __init__(self, history: History | None = None, strict: bool = True,
                 on_wake=None, on_abort=None):
        self.history = history if history is not None else History()
        self.strict = strict
        self.on_wake = on_wake
        self.on_abort = on_abort
        self.objects: dict[str, ManagedObject] = {}
        self.txns: dict[int, TransactionRecord] = {}
        self._txn_ids = count(1)
        self._inv_ids = count(1)

    # -- setup ---------------------------------------------------------------

    def add_object(self, name: str, spec: AdtSpec, initial_state=None) -> ManagedObject:
        if name in self.objects:
            raise FrameworkError(f"object {name} already exists")
        state = spec.initial_state if initial_state is None else initial_state
        obj = ManagedObject(name=name, index=len(self.objects), spec=spec,
                            state=state, strict=self.strict)
        self.objects[name] = obj
        return obj

    # -- transaction lifecycle -------------------------------------------------

    def begin(self, name: str) -> TransactionRecord:
        rec = TransactionRecord(id=next(self._txn_ids), name=name)
        self.txns[rec.id] = rec
        self.history.emit(hist.BEGIN, txn=rec.name)
        return rec

    def perform(self, rec: TransactionRecord, obj_name: str, call: PublicCall):
        """Issue one public call; a generator so the caller can park.

        Yields ("wait", inv) at most once, when the translated invocation
        blocked; resume it after the wake notification. Returns the public
        out-params. Raises TransactionAborted if issuing this call closed a
        waits-for cycle that this transaction lost.
        """
        assert rec.status is TxnStatus.ACTIVE, f"{rec.name} is {rec.status.value}"
        obj = self.objects[obj_name]
        tr = translate_public(obj.spec, call)
        if tr.null:
            # result decided by in-params alone: no invocation, no monitor
            self.history.emit(hist.NULLOP, txn=rec.name, obj=obj.name,
                              op=call.op, ins=call.ins, outs=tr.public_outs)
            rec.observations.append(
                Observation(obj.name, call.op, call.ins, tr.public_outs))
            return tr.public_outs
        inv = PrivateInvocation(id=next(self._inv_ids), txn=rec.id,
                                obj=obj.name, op=tr.call.op, ins=tr.call.ins)
        self.history.emit(hist.INVOKE, txn=rec.name, obj=obj.name,
                          op=inv.op, ins=inv.ins, inv_id=inv.id)
        outcome = obj.admit(inv)
        if outcome is AdmitOutcome.DEDUCED:
            self.history.emit(hist.DEDUCE, txn=rec.name, obj=obj.name,
                              op=inv.op, ins=inv.ins, outs=inv.outs,
                              inv_id=inv.id)
            self._register(rec, obj, inv)
            pub = public_outs_from_private(tr.rule, call.ins, inv.outs)
            rec.observations.append(Observation(obj.name, call.op, call.ins, pub))
            return pub
        if outcome is AdmitOutcome.BLOCKED:
            self.history.emit(hist.BLOCK, txn=rec.name, obj=obj.name,
                              op=inv.op, ins=inv.ins, inv_id=inv.id)
            rec.blocked_on = (obj, inv)
            self._resolve_deadlocks()
            if rec.status is not TxnStatus.ACTIVE:
                raise TransactionAborted(rec.name)
            if inv.lifecycle is Lifecycle.BLOCKED:
                yield ("wait", inv)
            # resolving a deadlock elsewhere may have admitted us already
            assert inv.lifecycle is Lifecycle.IN_EXECUTION
            assert rec.blocked_on is None
        outs = obj.execute(inv)
        self.history.emit(hist.EXEC, txn=rec.name, obj=obj.name, op=inv.op,
                          ins=inv.ins, outs=outs, inv_id=inv.id)
        woken = obj.complete(inv, outs)
        self._fire_wakes(obj, woken)
        self._register(rec, obj, inv)
        pub = public_outs_from_private(tr.rule, call.ins, outs)
        rec.observations.append(Observation(obj.name, call.op, call.ins, pub))
        return pub

    def commit(self, rec: TransactionRecord):
        assert rec.status is TxnStatus.ACTIVE, f"{rec.name} is {rec.status.value}"
        assert rec.blocked_on is None
        rec.status = TxnStatus.COMMITTING
        self.history.emit(hist.COMMIT, txn=rec.name)
        for obj, inv in self._release_order(rec):
            assert inv.lifecycle is Lifecycle.EXECUTED
            self._fire_wakes(obj, obj.finish(inv))
        rec.status = TxnStatus.COMMITTED

    def abort(self, rec: TransactionRecord):
        """Erase a transaction: withdraw, undo backwards, release.

        Never fails and never blocks; that is what makes two-phase locking
        with inverse undo livable.
        """
        assert rec.status is TxnStatus.ACTIVE, f"{rec.name} is {rec.status.value}"
        rec.status = TxnStatus.ABORTING
        self.history.emit(hist.ABORT, txn=rec.name)
        if rec.blocked_on is not None:
            obj, binv = rec.blocked_on
            self.history.emit(hist.WITHDRAW, txn=rec.name, obj=obj.name,
                              op=binv.op, ins=binv.ins, inv_id=binv.id)
            rec.blocked_on = None
            self._fire_wakes(obj, obj.withdraw(binv))
        for entry in reversed(rec.undo):
            outs = entry.obj.apply_inverse(entry.call)
            self.history.emit(hist.INVERSE, txn=rec.name, obj=entry.obj.name,
                              op=entry.call.op, ins=entry.call.ins, outs=outs,
                              inv_id=entry.inv.id)
            # release the undone op only once its inverse has landed
            self._fire_wakes(entry.obj, entry.obj.finish(entry.inv))
        for obj, inv in self._release_order(rec):
            if inv.lifecycle is Lifecycle.EXECUTED:   # the NULL-inverse ones
                self._fire_wakes(obj, obj.finish(inv))
        rec.status = TxnStatus.ABORTED
        if self.on_abort:
            self.on_abort(rec.id)

    # -- internals --------------------------------------------------------------

    def _release_order(self, rec):
        return sorted(rec.invocations, key=lambda p: (p[0].index, p[1].id))

    def _register(self, rec, obj, inv):
        rec.invocations.append((obj, inv))
        inverse = determine_inverse(obj.spec, inv.op, inv.ins, inv.outs)
        if inv.origin is Origin.DEDUCED:
            # a deduced result means the state never moved for this op
            assert inverse is None, f"deduced {inv!r} demands an undo"
        if inverse is not None:
            rec.undo.append(UndoEntry(obj, inv, inverse))

    def _fire_wakes(self, obj, woken):
        for w in woken:
            wrec = self.txns[w.txn]
            assert wrec.blocked_on is not None and wrec.blocked_on[1] is w
            wrec.blocked_on = None
            self.history.emit(hist.WAKE, txn=wrec.name, obj=obj.name, op=w.op,
                              ins=w.ins, inv_id=w.id)
            if self.on_wake:
                self.on_wake(w.txn)

    def waits_for_edges(self) -> dict[int, set[int]]:
        """Transaction-level waits-for graph, derived from the monitors."""
        adj: dict[int, set[int]] = {}
        for rec in self.txns.values():
            if rec.blocked_on is None:
                continue
            obj, w = rec.blocked_on
            for blocker_id, waiters in obj.blocks.items():
                if w.id in waiters:
                    owner = obj.find_invocation(blocker_id).txn
                    assert owner != rec.id, "self-edge in waits-for graph"
                    adj.setdefault(rec.id, set()).add(owner)
        return adj

    def _resolve_deadlocks(self):
        while True:
            cycle = find_cycle(self.waits_for_edges())
            if cycle is None:
                return
            victim = self.txns[max(cycle)]
            self.history.emit(hist.VICTIM, txn=victim.name)
            self.abort(victim)
