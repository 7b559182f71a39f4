"""Randomized workloads driven through the full oracle pipeline.

Every run is reproducible: per-run seeds are derived from the master seed by
integer arithmetic, the workload is generated from that seed, and the seed
is printed with any failure together with a greedily minimized workload
text. Re-running the text through `check` reproduces the failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .adts import builtin_names, get_adt
from .simulate import run_simulated
from .oracles import check_abort_transparency, check_serializable, validate_run
from .values import Tag, Value, boolean, item, rational
from .workload import (ObjectDecl, OpStep, RandomSchedule, TxnDecl, Workload,
                       make_step, render_workload)

ITEMS = ("a", "b", "c")
MAX_TXNS = 5   # the serializability oracle's factorial budget


def _random_state(rng: random.Random, adt: str):
    if adt == "stack":
        return tuple(rng.choice(ITEMS[:2]) for _ in range(rng.randint(0, 3)))
    if adt == "set":
        return frozenset(x for x in ITEMS if rng.random() < 0.5)
    if adt == "real":
        return Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    if adt == "boolean":
        return rng.random() < 0.5
    raise AssertionError(adt)


def _random_arg(rng: random.Random, tag: Tag) -> Value:
    if tag is Tag.ITEM:
        return item(rng.choice(ITEMS))
    if tag is Tag.RATIONAL:
        # includes 0 and 1 so NULL translations come up regularly
        return rational(Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
    if tag is Tag.BOOLEAN:
        return boolean(rng.random() < 0.5)
    raise AssertionError(tag)


def generate_workload(rng: random.Random, adts=None,
                      txns_range=(2, 4), ops_range=(1, 5)) -> Workload:
    adts = list(adts) if adts else builtin_names()
    objects = []
    for i in range(rng.randint(1, 3)):
        adt = rng.choice(adts)
        spec = get_adt(adt)
        state = _random_state(rng, adt)
        objects.append(ObjectDecl(f"o{i + 1}", adt, spec.render_state(state)))
    txns = []
    total_ops = 0
    for t in range(rng.randint(*txns_range)):
        steps = []
        for _ in range(rng.randint(*ops_range)):
            decl = rng.choice(objects)
            spec = get_adt(decl.adt)
            op = rng.choice(sorted(spec.public_ops))
            ins = tuple(_random_arg(rng, tag) for tag in spec.public_ops[op].ins)
            steps.append(make_step(spec, decl.name, op, ins))
            total_ops += 1
        txns.append(TxnDecl(f"T{t + 1}", tuple(steps), "commit"))
    schedule = RandomSchedule(seed=rng.randrange(2 ** 31),
                              max_steps=20 * total_ops + 20)
    return Workload(tuple(objects), tuple(txns), schedule)


def flip_random_abort(workload: Workload, rng: random.Random) -> Workload:
    """Turn one randomly chosen transaction's commit into an abort."""
    idx = rng.randrange(len(workload.txns))
    txns = tuple(
        TxnDecl(t.name, t.steps, "abort" if i == idx else t.terminal)
        for i, t in enumerate(workload.txns))
    return Workload(workload.objects, txns, workload.schedule)


def run_pipeline(workload: Workload, seed: int | None = None) -> tuple[bool, str, str]:
    """(ok, failing stage, detail). Stages: run, replay, serializability,
    transparency."""
    try:
        result = run_simulated(workload, seed=seed)
    except Exception as exc:                      # noqa: BLE001 - oracle boundary
        return False, "run", f"{type(exc).__name__}: {exc}"
    try:
        verdict = validate_run(result)
    except AssertionError as exc:
        return False, "replay", str(exc)
    if not verdict.ok:
        return False, "replay", verdict.detail
    verdict = check_serializable(result)
    if not verdict.ok:
        return False, "serializability", verdict.detail
    if any(t.terminal == "abort" for t in workload.txns) or \
            result.metrics.victims:
        verdict = check_abort_transparency(result)
        if not verdict.ok:
            return False, "transparency", verdict.detail
    return True, "", ""


def minimize(workload: Workload, still_fails) -> Workload:
    """Greedy shrink: drop whole transactions, then single ops, while the
    failure predicate holds."""
    budget = 200

    def attempt(candidate):
        nonlocal budget
        if budget <= 0:
            return False
        budget -= 1
        return still_fails(candidate)

    changed = True
    while changed and budget > 0:
        changed = False
        if len(workload.txns) > 1:
            for i in range(len(workload.txns)):
                txns = workload.txns[:i] + workload.txns[i + 1:]
                candidate = Workload(workload.objects, txns, workload.schedule)
                if attempt(candidate):
                    workload = candidate
                    changed = True
                    break
            if changed:
                continue
        for ti, txn in enumerate(workload.txns):
            if not txn.steps:
                continue
            for si in range(len(txn.steps)):
                steps = txn.steps[:si] + txn.steps[si + 1:]
                txns = (workload.txns[:ti]
                        + (TxnDecl(txn.name, steps, txn.terminal),)
                        + workload.txns[ti + 1:])
                candidate = Workload(workload.objects, txns, workload.schedule)
                if attempt(candidate):
                    workload = candidate
                    changed = True
                    break
            if changed:
                break
    return workload


@dataclass
class FuzzFailure:
    run_index: int
    seed: int
    stage: str
    detail: str
    workload_text: str


@dataclass
class FuzzReport:
    runs: int
    with_abort: bool
    failures: list[FuzzFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def derive_seed(master: int, index: int) -> int:
    return master * 1000003 + index * 7919


def fuzz(master_seed: int, runs: int, adts=None, txns_range=(2, 4),
         ops_range=(1, 5), with_abort: bool = False,
         shrink: bool = True) -> FuzzReport:
    assert txns_range[1] <= MAX_TXNS, "past the serializability oracle budget"
    report = FuzzReport(runs=runs, with_abort=with_abort)
    for i in range(runs):
        seed = derive_seed(master_seed, i)
        rng = random.Random(seed)
        workload = generate_workload(rng, adts, txns_range, ops_range)
        if with_abort:
            workload = flip_random_abort(workload, rng)
        ok, stage, detail = run_pipeline(workload)
        if ok:
            continue
        if shrink:
            workload = minimize(
                workload, lambda w: not run_pipeline(w)[0])
            ok, stage, detail = run_pipeline(workload)
            assert not ok
        report.failures.append(FuzzFailure(
            i, seed, stage, detail, render_workload(workload)))
    return report
