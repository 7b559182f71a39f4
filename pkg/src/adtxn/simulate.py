"""Deterministic cooperative simulation of concurrent transactions.

Each transaction runs as a generator coroutine. The scheduling quantum is
one public operation: a resumed transaction runs until its current call
completes (yielding a boundary), suspends on a block, or terminates. The
commit/abort statement is its own quantum. Given the same workload and seed
the interleaving, the event stream and therefore the rendered trace are
byte-identical on every run; there is no wall clock and no thread anywhere.

A schedule is either seeded-random (uniform choice among runnable
transactions, with a step cap as a safety net against bugs that stall
progress) or an explicit token list naming which transaction advances next;
tokens for transactions that are waiting or finished are skipped, and when
tokens run out the lowest-numbered runnable transaction proceeds.

Deadlock victims parked inside the scheduler are unwound on the spot: the
manager reports the abort, and the victim's coroutine receives
TransactionAborted immediately rather than occupying a schedule slot later.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .adts import get_adt
from .core import FrameworkError, PublicCall
from .history import History, Metrics, compute_metrics, render_trace
from .manager import (TransactionAborted, TransactionManager, TxnStatus)
from .workload import (ExplicitSchedule, RandomSchedule, TxnDecl, Workload,
                       initial_state)


class SimulationError(FrameworkError):
    pass


class ScheduleStuck(SimulationError):
    """No transaction is runnable but the workload has not finished."""


class StepLimitExceeded(SimulationError):
    """The run did not finish within the schedule's step cap."""


class _ActState(Enum):
    READY = "ready"
    RUNNING = "running"
    WAITING = "waiting"
    DONE = "done"


class _Activity:
    def __init__(self, decl: TxnDecl):
        self.decl = decl
        self.state = _ActState.READY
        self.gen = None
        self.rec = None


@dataclass
class RunResult:
    workload: Workload
    history: History
    metrics: Metrics
    final_states: dict[str, object]
    statuses: dict[str, TxnStatus]
    observations: dict[str, list]

    @property
    def trace(self) -> str:
        return render_trace(self.history)

    def rendered_states(self) -> dict[str, str]:
        out = {}
        for decl in self.workload.objects:
            out[decl.name] = get_adt(decl.adt).render_state(self.final_states[decl.name])
        return out


def run_simulated(workload: Workload, seed: int | None = None,
                  strict: bool = True) -> RunResult:
    return _Simulation(workload, seed, strict).run()


class _Simulation:
    def __init__(self, workload, seed, strict):
        self.workload = workload
        self.history = History()
        self.mgr = TransactionManager(self.history, strict=strict,
                                      on_wake=self._on_wake,
                                      on_abort=self._on_abort)
        for decl in workload.objects:
            self.mgr.add_object(decl.name, get_adt(decl.adt), initial_state(decl))
        self.activities = [_Activity(decl) for decl in workload.txns]
        for act in self.activities:
            act.gen = self._drive(act)
        self._by_txn_id: dict[int, _Activity] = {}
        sched = workload.schedule
        if isinstance(sched, RandomSchedule):
            self.rng = random.Random(sched.seed if seed is None else seed)
            self.max_steps = sched.max_steps
            self.tokens = None
        else:
            assert isinstance(sched, ExplicitSchedule)
            self.rng = None
            self.max_steps = None
            self.tokens = list(sched.tokens)

    def run(self) -> RunResult:
        steps = 0
        while any(a.state is not _ActState.DONE for a in self.activities):
            ready = [a for a in self.activities if a.state is _ActState.READY]
            if not ready:
                stuck = [a.decl.name for a in self.activities
                         if a.state is _ActState.WAITING]
                raise ScheduleStuck(f"nothing runnable; waiting: {stuck}")
            steps += 1
            if self.max_steps is not None and steps > self.max_steps:
                raise StepLimitExceeded(
                    f"needed more than {self.max_steps} scheduler steps")
            self._resume(self._pick(ready))
        return self._result()

    # -- scheduling -----------------------------------------------------------

    def _pick(self, ready):
        if self.rng is not None:
            return self.rng.choice(ready)
        while self.tokens:
            name = self.tokens.pop(0)
            for act in self.activities:
                if act.decl.name == name and act.state is _ActState.READY:
                    return act
            # tokens naming waiting or finished txns are skipped
        return ready[0]

    def _resume(self, act):
        act.state = _ActState.RUNNING
        try:
            yielded = act.gen.send(None)
        except StopIteration:
            act.state = _ActState.DONE
            return
        if yielded == ("boundary",):
            act.state = _ActState.READY
        else:
            assert yielded[0] == "wait"
            act.state = _ActState.WAITING

    # -- transaction program ----------------------------------------------------

    def _drive(self, act):
        rec = self.mgr.begin(act.decl.name)
        act.rec = rec
        self._by_txn_id[rec.id] = act
        try:
            for step in act.decl.steps:
                yield from self.mgr.perform(
                    rec, step.obj, PublicCall(step.op, step.ins))
                yield ("boundary",)
            if act.decl.terminal == "commit":
                self.mgr.commit(rec)
            else:
                self.mgr.abort(rec)
        except TransactionAborted:
            pass

    # -- manager callbacks ---------------------------------------------------------

    def _on_wake(self, txn_id):
        act = self._by_txn_id[txn_id]
        if act.state is _ActState.WAITING:
            act.state = _ActState.READY
        # a RUNNING activity woken mid-deadlock-resolution never suspends

    def _on_abort(self, txn_id):
        act = self._by_txn_id[txn_id]
        if act.state is _ActState.RUNNING:
            # the victim is the caller itself; perform raises on return
            return
        assert act.state is _ActState.WAITING, \
            f"victim {act.decl.name} was {act.state.value}"
        try:
            act.gen.throw(TransactionAborted(act.decl.name))
        except StopIteration:
            pass
        else:
            raise AssertionError(f"{act.decl.name} kept running after abort")
        act.state = _ActState.DONE

    # -- wrap-up ----------------------------------------------------------------

    def _result(self):
        for obj in self.mgr.objects.values():
            assert not obj.blocked and not obj.in_execution and not obj.executed, \
                f"{obj.name} not drained at end of run"
        statuses = {}
        observations = {}
        for act in self.activities:
            assert act.rec is not None
            assert act.rec.status in (TxnStatus.COMMITTED, TxnStatus.ABORTED)
            statuses[act.decl.name] = act.rec.status
            observations[act.decl.name] = list(act.rec.observations)
        high = {name: obj.max_in_execution
                for name, obj in self.mgr.objects.items()}
        return RunResult(
            workload=self.workload,
            history=self.history,
            metrics=compute_metrics(self.history, high),
            final_states={n: o.state for n, o in self.mgr.objects.items()},
            statuses=statuses,
            observations=observations,
        )
