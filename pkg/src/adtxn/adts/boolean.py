"""Boolean cell: public AND, OR, XOR, NOT, SETTO, READ.

Translation collapses the whole public surface onto three private ops. An
AND with true, OR with false or XOR with false is NULL outright; AND with
false and OR with true become assignments; XOR with true is a NOT. Only READ
returns anything publicly; the assignment's before-image is a hidden
out-param.
"""

from __future__ import annotations

from ..core import AdtSpec, InverseRule, OpSig, PrivateCall, PublicCall, TranslationRule
from ..tables import CommutTables, InCommutEntry, OutCommutEntry
from ..values import FALSE, TRUE, Tag, boolean


def _apply(state, op, ins):
    if op == "NOT":
        return not state, ()
    if op == "SETTO":
        return ins[0].payload, (boolean(state),)
    if op == "READ":
        return state, (boolean(state),)
    raise AssertionError(op)


def _parse_state(text):
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"bad boolean literal {text!r}")


def _render_state(state):
    return "true" if state else "false"


def _enumerate_states(bound):
    return [False, True]


def _probe_calls(bound):
    return [PrivateCall("NOT", ()),
            PrivateCall("SETTO", (TRUE,)),
            PrivateCall("SETTO", (FALSE,)),
            PrivateCall("READ", ())]


def _probe_public_calls(bound):
    calls = []
    for op in ("AND", "OR", "XOR", "SETTO"):
        calls += [PublicCall(op, (TRUE,)), PublicCall(op, (FALSE,))]
    calls += [PublicCall("NOT", ()), PublicCall("READ", ())]
    return calls


def _to(value):
    return lambda ins: PrivateCall("SETTO", (value,))


_NO_OUTS = lambda ins, pouts: ()

_TRANSLATION = (
    TranslationRule("AND", when=lambda ins: ins[0] == TRUE, null=True),
    TranslationRule("AND", when=lambda ins: ins[0] == FALSE,
                    target=_to(FALSE), outs=_NO_OUTS),
    TranslationRule("OR", when=lambda ins: ins[0] == FALSE, null=True),
    TranslationRule("OR", when=lambda ins: ins[0] == TRUE,
                    target=_to(TRUE), outs=_NO_OUTS),
    TranslationRule("XOR", when=lambda ins: ins[0] == FALSE, null=True),
    TranslationRule("XOR", when=lambda ins: ins[0] == TRUE,
                    target=lambda ins: PrivateCall("NOT", ()), outs=_NO_OUTS),
    TranslationRule("NOT", when=lambda ins: True,
                    target=lambda ins: PrivateCall("NOT", ()), outs=_NO_OUTS),
    TranslationRule("SETTO", when=lambda ins: True,
                    target=lambda ins: PrivateCall("SETTO", ins), outs=_NO_OUTS),
    TranslationRule("READ", when=lambda ins: True,
                    target=lambda ins: PrivateCall("READ", ()),
                    outs=lambda ins, pouts: pouts),
)

_INVERSES = (
    InverseRule("NOT", when=lambda i, o: True,
                target=lambda i, o: PrivateCall("NOT", ())),
    InverseRule("SETTO", when=lambda i, o: i[0] == o[0], null=True),
    InverseRule("SETTO", when=lambda i, o: i[0] != o[0],
                target=lambda i, o: PrivateCall("SETTO", (o[0],))),
    InverseRule("READ", when=lambda i, o: True, null=True),
)

_IN_ENTRIES = (
    InCommutEntry("NOT", "NOT", when=lambda a, b: True),
    InCommutEntry("READ", "READ", when=lambda a, b: True),
)

_OUT_ENTRIES = (
    OutCommutEntry("READ", "READ", when=lambda ei, eo, ii: True,
                   deduce=lambda ei, eo, ii: (eo[0],)),
    OutCommutEntry("SETTO", "READ",
                   when=lambda ei, eo, ii: eo[0] == ei[0],
                   deduce=lambda ei, eo, ii: (ei[0],)),
    OutCommutEntry("SETTO", "SETTO",
                   when=lambda ei, eo, ii: eo[0] == ei[0] and ii[0] == ei[0],
                   deduce=lambda ei, eo, ii: (ei[0],)),
    OutCommutEntry("READ", "SETTO",
                   when=lambda ei, eo, ii: ii[0] == eo[0],
                   deduce=lambda ei, eo, ii: (eo[0],)),
)

_BOOL_IN = OpSig((Tag.BOOLEAN,), ())

BOOLEAN = AdtSpec(
    name="boolean",
    public_ops={
        "AND": _BOOL_IN,
        "OR": _BOOL_IN,
        "XOR": _BOOL_IN,
        "NOT": OpSig((), ()),
        "SETTO": _BOOL_IN,
        "READ": OpSig((), (Tag.BOOLEAN,)),
    },
    private_ops={
        "NOT": OpSig((), ()),
        "SETTO": OpSig((Tag.BOOLEAN,), (Tag.BOOLEAN,)),
        "READ": OpSig((), (Tag.BOOLEAN,)),
    },
    translation=_TRANSLATION,
    inverses=_INVERSES,
    tables=CommutTables(_IN_ENTRIES, _OUT_ENTRIES),
    apply=_apply,
    initial_state=False,
    parse_state=_parse_state,
    render_state=_render_state,
    enumerate_states=_enumerate_states,
    probe_calls=_probe_calls,
    probe_public_calls=_probe_public_calls,
)
