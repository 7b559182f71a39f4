"""Run histories: the event stream a simulation produces.

The trace file format is one line per event,

    <index> <kind> txn=<name> obj=<name|-> op=<OP|-> in=[...] out=[...]

and is the exchange format the oracles and the determinism checks compare
byte for byte. Events additionally carry the invocation id in memory (not in
the file) so the monitor reconstructor can tie WAKE and INVERSE lines back
to the invocation they concern.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .values import Value, render_params

BEGIN = "BEGIN"
INVOKE = "INVOKE"
BLOCK = "BLOCK"
WAKE = "WAKE"
EXEC = "EXEC"
DEDUCE = "DEDUCE"
NULLOP = "NULLOP"
COMMIT = "COMMIT"
ABORT = "ABORT"
INVERSE = "INVERSE"
WITHDRAW = "WITHDRAW"
VICTIM = "VICTIM"

KINDS = (BEGIN, INVOKE, BLOCK, WAKE, EXEC, DEDUCE, NULLOP, COMMIT, ABORT,
         INVERSE, WITHDRAW, VICTIM)


@dataclass(frozen=True)
class Event:
    index: int
    kind: str
    txn: str
    obj: str | None = None
    op: str | None = None
    ins: tuple[Value, ...] = ()
    outs: tuple[Value, ...] = ()
    inv_id: int | None = None

    def render(self) -> str:
        return (f"{self.index} {self.kind} txn={self.txn} obj={self.obj or '-'} "
                f"op={self.op or '-'} in={render_params(self.ins)} "
                f"out={render_params(self.outs)}")


@dataclass
class History:
    events: list[Event] = field(default_factory=list)

    def emit(self, kind, txn, obj=None, op=None, ins=(), outs=(), inv_id=None) -> Event:
        assert kind in KINDS
        ev = Event(len(self.events), kind, txn, obj, op, tuple(ins), tuple(outs), inv_id)
        self.events.append(ev)
        return ev

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.kind == kind)


def render_trace(history: History) -> str:
    return "".join(e.render() + "\n" for e in history)


@dataclass(frozen=True)
class Metrics:
    invocations: int
    null_ops: int
    executions: int
    deductions: int
    blocks: int
    wakeups: int
    withdrawals: int
    inverses: int
    commits: int
    aborts: int
    victims: int
    max_in_execution: dict[str, int]

    def render(self) -> str:
        lines = [f"invocations {self.invocations}",
                 f"null_ops {self.null_ops}",
                 f"executions {self.executions}",
                 f"deductions {self.deductions}",
                 f"blocks {self.blocks}",
                 f"wakeups {self.wakeups}",
                 f"withdrawals {self.withdrawals}",
                 f"inverses {self.inverses}",
                 f"commits {self.commits}",
                 f"aborts {self.aborts}",
                 f"victims {self.victims}"]
        for name in sorted(self.max_in_execution):
            lines.append(f"max_in_execution {name} {self.max_in_execution[name]}")
        return "".join(line + "\n" for line in lines)


def compute_metrics(history: History, high_water: dict[str, int] | None = None) -> Metrics:
    m = Metrics(
        invocations=history.count(INVOKE),
        null_ops=history.count(NULLOP),
        executions=history.count(EXEC),
        deductions=history.count(DEDUCE),
        blocks=history.count(BLOCK),
        wakeups=history.count(WAKE),
        withdrawals=history.count(WITHDRAW),
        inverses=history.count(INVERSE),
        commits=history.count(COMMIT),
        aborts=history.count(ABORT),
        victims=history.count(VICTIM),
        max_in_execution=dict(high_water or {}),
    )
    check_metric_identities(m)
    return m


def check_metric_identities(m: Metrics):
    """Accounting identities every run must satisfy.

    Each invocation that reaches a monitor ends in exactly one of:
    executed, deduced, or withdrawn while still blocked.
    """
    assert m.executions + m.deductions + m.withdrawals == m.invocations, \
        f"invocation accounting broken: {m}"
    assert m.blocks >= m.wakeups, f"more wakeups than blocks: {m}"
    assert m.victims <= m.aborts, f"victims not a subset of aborts: {m}"
