"""Two-level operation interface for recoverable data types.

A data type exposes *public* operations to transactions but runs *private*
operations inside its object. The split does two jobs at once:

* translation can inspect the public in-parameters and pick a private
  operation whose commutativity is wider (multiply by zero is really an
  assignment; add zero is nothing at all), and
* every private operation is built to be undoable, either because it has an
  exact inverse or because it smuggles the before-image out through a hidden
  out-parameter.

Translation happens before any concurrency control and may decide the call
is a NULL operation: result known from in-parameters alone, no state touched,
so it bypasses the object entirely. That decision must therefore never look
at object state, which is why TranslationRule conditions receive only the
public in-parameters.

Inverses are resolved *after* execution from the pair (in-params, out-params)
of the executed private operation. A rule may name an inverse call or declare
the inverse NULL (the operation turned out not to change state). NULL-inverse
operations are still concurrency-controlled; only NULL *direct* operations
escape the monitor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Sequence

from .values import Tag, Value, render_params


class FrameworkError(Exception):
    """Base for all errors raised by this package."""


class UnknownOp(FrameworkError):
    pass


class ArityMismatch(FrameworkError):
    pass


class TagMismatch(FrameworkError):
    pass


class NoRuleMatches(FrameworkError):
    pass


class PreconditionViolated(FrameworkError):
    """A private operation was applied outside its declared domain."""


class Lifecycle(Enum):
    NEW = "new"
    BLOCKED = "blocked"
    IN_EXECUTION = "in_execution"
    EXECUTED = "executed"
    FINISHED = "finished"


class Origin(Enum):
    EXECUTED = "executed"   # out-params produced by running the operation
    DEDUCED = "deduced"     # out-params inferred from executed predecessors


@dataclass(frozen=True)
class OpSig:
    """Parameter shape of one operation: in-tags and out-tags.

    An out slot may be filled by UNIT at runtime even when declared with a
    concrete tag (a pop of an empty stack returns no item), so out checking
    accepts UNIT anywhere.
    """
    ins: tuple[Tag, ...]
    outs: tuple[Tag, ...] = ()


@dataclass(frozen=True)
class PublicCall:
    op: str
    ins: tuple[Value, ...]

    def __repr__(self):
        return f"{self.op}{render_params(self.ins)}"


@dataclass(eq=False)
class PrivateInvocation:
    """One private operation instance inside an object's monitor.

    The only mutable record in the package. lifecycle, outs and the execution
    counter are each written once, always inside the owning monitor's entry
    sections; everything else is fixed at creation. ids are assigned in
    monitor arrival order and are global across objects, which makes the
    blocking relation acyclic by construction (later ids wait on earlier).
    """
    id: int
    txn: int
    obj: str
    op: str
    ins: tuple[Value, ...]
    outs: tuple[Value, ...] | None = None
    origin: Origin = Origin.EXECUTED
    lifecycle: Lifecycle = Lifecycle.NEW
    executions: int = 0

    def __repr__(self):
        outs = render_params(self.outs) if self.outs is not None else "?"
        return (f"inv#{self.id}(txn={self.txn} {self.obj}.{self.op}"
                f"{render_params(self.ins)}->{outs} {self.lifecycle.value})")


@dataclass(frozen=True)
class PrivateCall:
    """An (op, ins) pair naming a private operation to run; used for
    translation targets and inverses before they become invocations."""
    op: str
    ins: tuple[Value, ...]

    def __repr__(self):
        return f"{self.op}{render_params(self.ins)}"


@dataclass(frozen=True)
class TranslationRule:
    """Maps a region of a public op's in-parameter space to a private call.

    null=True marks the NULL direct operation: public outs are computed by
    `outs` from the in-params and the object is never involved. Otherwise
    `target` builds the private call and `outs` (if the public op returns
    anything) projects the private out-params to the public ones.
    """
    public_op: str
    when: Callable[[tuple[Value, ...]], bool]
    null: bool = False
    target: Callable[[tuple[Value, ...]], PrivateCall] | None = None
    outs: Callable[..., tuple[Value, ...]] | None = None
    note: str = ""


@dataclass(frozen=True)
class InverseRule:
    """Selects the undo for one executed private operation.

    `when` sees (ins, outs) of the executed operation. null=True declares the
    inverse NULL (nothing to undo); otherwise `target` builds the inverse
    private call from the same (ins, outs).
    """
    op: str
    when: Callable[[tuple[Value, ...], tuple[Value, ...]], bool]
    null: bool = False
    target: Callable[[tuple[Value, ...], tuple[Value, ...]], PrivateCall] | None = None
    note: str = ""


@dataclass(frozen=True)
class Translation:
    """Result of translating one public call."""
    rule: TranslationRule
    call: PrivateCall | None          # None iff NULL direct
    public_outs: tuple[Value, ...] | None   # set iff NULL direct

    @property
    def null(self) -> bool:
        return self.call is None


# apply signature: (state, op, ins) -> (new_state, outs)
ApplyFn = Callable[[Any, str, tuple[Value, ...]], tuple[Any, tuple[Value, ...]]]


@dataclass(frozen=True)
class AdtSpec:
    """Complete description of one abstract data type.

    `apply` is the pure-functional reference semantics of the private
    operations; the monitor, the validator and the oracles all execute
    through it, so there is exactly one definition of what an op does.
    `enumerate_states` and `probe_calls` bound the domains the brute-force
    validator sweeps.
    """
    name: str
    public_ops: dict[str, OpSig]
    private_ops: dict[str, OpSig]
    translation: tuple[TranslationRule, ...]
    inverses: tuple[InverseRule, ...]
    tables: "Any"                      # CommutTables; kept loose to avoid an import cycle
    apply: ApplyFn
    initial_state: Any
    parse_state: Callable[[str], Any]
    render_state: Callable[[Any], str]
    enumerate_states: Callable[[int], Iterable[Any]]
    probe_calls: Callable[[int], Sequence[PrivateCall]]
    probe_public_calls: Callable[[int], Sequence[PublicCall]]


def _check_ins(spec: AdtSpec, op: str, ins: tuple[Value, ...], table: dict[str, OpSig]):
    if op not in table:
        raise UnknownOp(f"{spec.name} has no operation {op}")
    sig = table[op]
    if len(ins) != len(sig.ins):
        raise ArityMismatch(
            f"{spec.name}.{op} takes {len(sig.ins)} in-params, got {len(ins)}")
    for got, want in zip(ins, sig.ins):
        if got.tag is not want:
            raise TagMismatch(
                f"{spec.name}.{op} expects {want.value}, got {got.tag.value} "
                f"({got!r})")


def check_public_ins(spec: AdtSpec, call: PublicCall):
    _check_ins(spec, call.op, call.ins, spec.public_ops)


def check_private_ins(spec: AdtSpec, call: PrivateCall):
    _check_ins(spec, call.op, call.ins, spec.private_ops)


def check_outs(spec: AdtSpec, op: str, outs: tuple[Value, ...]):
    sig = spec.private_ops[op]
    if len(outs) != len(sig.outs):
        raise ArityMismatch(
            f"{spec.name}.{op} produces {len(sig.outs)} out-params, got {len(outs)}")
    for got, want in zip(outs, sig.outs):
        # UNIT stands for "no value in this slot" and is always admissible.
        if got.tag is not want and got.tag is not Tag.UNIT:
            raise TagMismatch(
                f"{spec.name}.{op} out-param should be {want.value}, "
                f"got {got.tag.value}")


def translate_public(spec: AdtSpec, call: PublicCall) -> Translation:
    """Resolve a public call to its private call or to a NULL direct op.

    Exactly one rule may match any well-formed call; rule conditions must
    partition the in-parameter space (the validator sweeps this). State is
    deliberately unavailable here.
    """
    check_public_ins(spec, call)
    matches = [r for r in spec.translation if r.public_op == call.op and r.when(call.ins)]
    if not matches:
        raise NoRuleMatches(f"no translation rule matches {spec.name}.{call!r}")
    if len(matches) > 1:
        notes = ", ".join(m.note or "?" for m in matches)
        raise FrameworkError(
            f"translation rules overlap for {spec.name}.{call!r}: {notes}")
    rule = matches[0]
    if rule.null:
        outs = rule.outs(call.ins) if rule.outs else ()
        return Translation(rule, None, outs)
    target = rule.target(call.ins)
    check_private_ins(spec, target)
    return Translation(rule, target, None)


def public_outs_from_private(rule: TranslationRule, ins: tuple[Value, ...],
                             private_outs: tuple[Value, ...]) -> tuple[Value, ...]:
    """Project an executed private op's outs to the public caller's view."""
    if rule.outs is None:
        return ()
    return rule.outs(ins, private_outs)


def determine_inverse(spec: AdtSpec, op: str, ins: tuple[Value, ...],
                      outs: tuple[Value, ...]) -> PrivateCall | None:
    """Pick the inverse of an executed private op; None means NULL inverse.

    Must be called only after outs are known: inverse selection is allowed to
    read results (an insert that reported AlreadyIn has nothing to undo).
    """
    matches = [r for r in spec.inverses if r.op == op and r.when(ins, outs)]
    if not matches:
        raise NoRuleMatches(
            f"no inverse rule matches {spec.name}.{op}{render_params(ins)}"
            f"->{render_params(outs)}")
    if len(matches) > 1:
        notes = ", ".join(m.note or "?" for m in matches)
        raise FrameworkError(f"inverse rules overlap for {spec.name}.{op}: {notes}")
    rule = matches[0]
    if rule.null:
        return None
    target = rule.target(ins, outs)
    check_private_ins(spec, target)
    return target
