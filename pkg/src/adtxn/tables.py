"""Conditional commutativity tables and the queries the monitor runs.

Two tables per data type, one policy: absence means conflict.

The in-table answers from in-parameters alone and is consulted against
operations whose results are not yet known (blocked or executing). Entries
are unordered: storing PUSH/PUSH once covers both argument orders, and the
query tries both.

The out-table is consulted against *executed* operations, whose
out-parameters exist, so its entries are ordered (executed first) and its
conditions may read the executed op's results. An entry may also carry a
deduction: a closed form for the incoming op's out-parameters, valid exactly
when the entry's condition holds. Deducing lets the monitor answer an
operation without running it, which is what makes reading past an
uncommitted writer safe: the answer provably does not depend on whether that
writer commits.

In-commutativity is the stronger claim (it holds whatever the results turn
out to be), so the out-query falls back to the in-table when no out-entry
matches; the fallback never deduces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .values import Value

# Condition/deduction signatures:
#   in-entry   when(ins_a, ins_b) -> bool
#   out-entry  when(executed_ins, executed_outs, incoming_ins) -> bool
#   deduce(executed_ins, executed_outs, incoming_ins) -> incoming outs


@dataclass(frozen=True)
class InCommutEntry:
    op_a: str
    op_b: str
    when: Callable[[tuple[Value, ...], tuple[Value, ...]], bool]
    note: str = ""


@dataclass(frozen=True)
class OutCommutEntry:
    executed_op: str
    incoming_op: str
    when: Callable[[tuple[Value, ...], tuple[Value, ...], tuple[Value, ...]], bool]
    deduce: Callable[[tuple[Value, ...], tuple[Value, ...], tuple[Value, ...]],
                     tuple[Value, ...]] | None = None
    note: str = ""


@dataclass(frozen=True)
class CommutTables:
    in_entries: tuple[InCommutEntry, ...]
    out_entries: tuple[OutCommutEntry, ...]


def commute_with_in(tables: CommutTables, a, b) -> bool:
    """Unordered in-parameter commutativity of two calls (.op/.ins duck type)."""
    for e in tables.in_entries:
        if e.op_a == a.op and e.op_b == b.op and e.when(a.ins, b.ins):
            return True
        if e.op_a == b.op and e.op_b == a.op and e.when(b.ins, a.ins):
            return True
    return False


@dataclass(frozen=True)
class OutVerdict:
    commutes: bool
    deduced: tuple[Value, ...] | None = None


NO_COMMUTE = OutVerdict(False)


def _out_entry_for(tables: CommutTables, executed, incoming) -> OutCommutEntry | None:
    for e in tables.out_entries:
        if (e.executed_op == executed.op and e.incoming_op == incoming.op
                and e.when(executed.ins, executed.outs, incoming.ins)):
            return e
    return None


def commute_with_in_out(tables: CommutTables, executed, incoming) -> OutVerdict:
    """Does `incoming` commute with the already-executed `executed`?

    `executed` must carry outs. Returns the deduction the matching entry
    offers, if any; the in-table fallback offers none.
    """
    assert executed.outs is not None, f"{executed!r} has no outs yet"
    e = _out_entry_for(tables, executed, incoming)
    if e is not None:
        ded = e.deduce(executed.ins, executed.outs, incoming.ins) if e.deduce else None
        return OutVerdict(True, ded)
    if commute_with_in(tables, executed, incoming):
        return OutVerdict(True, None)
    return NO_COMMUTE


def try_deduce(tables: CommutTables, incoming, executed_ops, pending_ops
               ) -> tuple[Value, ...] | None:
    """Attempt to answer `incoming` without executing it.

    Succeeds only when every executed op admits it through an out-entry that
    carries a deduction (the state's relevant aspect is then pinned by those
    results) and it in-commutes with every blocked or in-execution op (whose
    results could otherwise still shift the answer). With no executed ops
    there is nothing to pin the state, so no deduction.

    All executed ops must agree on the deduced value; a disagreement is a
    table soundness bug and fails loud.
    """
    if not executed_ops:
        return None
    deduced = []
    for ex in executed_ops:
        e = _out_entry_for(tables, ex, incoming)
        if e is None or e.deduce is None:
            return None
        deduced.append(e.deduce(ex.ins, ex.outs, incoming.ins))
    for p in pending_ops:
        if not commute_with_in(tables, p, incoming):
            return None
    first = deduced[0]
    assert all(d == first for d in deduced), \
        f"deduction disagreement for {incoming!r}: {deduced}"
    return first
