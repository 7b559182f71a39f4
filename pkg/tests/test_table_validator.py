"""The brute-force sweeps must pass on the shipped types and, just as
importantly, must catch planted lies. A validator nobody has seen fail is
not evidence of anything."""

import dataclasses

import pytest

from adtxn.adts import get_adt
from adtxn.core import InverseRule, PrivateCall, TranslationRule
from adtxn.tables import CommutTables, InCommutEntry, OutCommutEntry
from adtxn.validate import (
    check_in_table,
    check_inverses,
    check_out_table,
    check_translation,
    validate_adt,
)
from adtxn.values import UNIT, item, report

STACK = get_adt("stack")

BOUNDS = {"stack": 3, "set": 3, "real": 40, "boolean": 3}


@pytest.mark.parametrize("name", ["stack", "set", "real", "boolean"])
def test_builtin_types_sweep_clean(name):
    spec = get_adt(name)
    for rep in validate_adt(spec, bound=BOUNDS[name]):
        assert rep.cases > 0, f"{name} {rep.check} swept nothing"
        assert rep.ok, f"{name} {rep.check}: {[v.detail for v in rep.violations[:3]]}"


# ------------------------------------------------------- planted-lie checks

def with_in_entry(spec, entry):
    t = spec.tables
    return dataclasses.replace(spec, tables=CommutTables(t.in_entries + (entry,),
                                                         t.out_entries))


def with_out_entry(spec, entry):
    t = spec.tables
    return dataclasses.replace(spec, tables=CommutTables(t.in_entries,
                                                         t.out_entries + (entry,)))


def test_in_table_sweep_catches_a_false_claim():
    liar = with_in_entry(STACK, InCommutEntry("PUSH", "POP", when=lambda a, b: True))
    rep = check_in_table(liar, bound=3)
    assert not rep.ok
    assert any("PUSH" in v.detail and "POP" in v.detail for v in rep.violations)


def test_out_table_sweep_catches_a_false_deduction():
    # claims a pop after a *false* emptiness test still finds nothing
    liar = with_out_entry(STACK, OutCommutEntry(
        "EMPTY", "POP",
        when=lambda ei, eo, ii: eo[0].payload is False,
        deduce=lambda ei, eo, ii: (UNIT, report("EmptyStack"))))
    rep = check_out_table(liar, bound=3)
    assert not rep.ok


def test_out_table_sweep_catches_overlapping_entries():
    dup = with_out_entry(STACK, OutCommutEntry(
        "EMPTY", "EMPTY",
        when=lambda ei, eo, ii: True,
        deduce=lambda ei, eo, ii: (eo[0],)))
    rep = check_out_table(dup, bound=2)
    assert any("overlap" in v.detail for v in rep.violations)


def test_inverse_sweep_catches_a_false_null():
    rules = tuple(r for r in STACK.inverses if r.op != "PUSH")
    rules += (InverseRule("PUSH", when=lambda i, o: True, null=True),)
    liar = dataclasses.replace(STACK, inverses=rules)
    rep = check_inverses(liar, bound=2)
    assert not rep.ok
    assert any("moved the state" in v.detail for v in rep.violations)


def test_inverse_sweep_catches_a_wrong_target():
    rules = tuple(r for r in STACK.inverses if r.op != "POP")
    rules += (InverseRule("POP", when=lambda i, o: True,
                          target=lambda i, o: PrivateCall("PUSH", (item("a"),))),)
    liar = dataclasses.replace(STACK, inverses=rules)
    rep = check_inverses(liar, bound=2)
    assert not rep.ok


def test_translation_sweep_catches_overlapping_rules():
    extra = (TranslationRule("POP", when=lambda ins: True,
                             target=lambda ins: PrivateCall("POP", ins),
                             outs=lambda ins, pouts: pouts),)
    liar = dataclasses.replace(STACK, translation=STACK.translation + extra)
    rep = check_translation(liar, bound=2)
    assert not rep.ok
    assert any("overlap" in v.detail for v in rep.violations)


def test_translation_sweep_catches_a_gap():
    rules = tuple(r for r in STACK.translation if r.public_op != "EMPTY")
    liar = dataclasses.replace(STACK, translation=rules)
    rep = check_translation(liar, bound=2)
    assert not rep.ok
