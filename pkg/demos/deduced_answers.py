# Answering an operation without running it.
#
# Two transactions share a stack. T1 asks EMPTY and learns "true" but has
# not committed yet, so that answer is still provisional. T2 then tries to
# POP. Waiting for T1 would be the safe default, but here it is not needed:
# whichever way T1's fate goes, the stack T2 sees is empty, so POP must
# report EmptyStack. The monitor deduces that answer from T1's pending
# result and never executes the POP at all.

from adtxn.simulate import run_simulated
from adtxn.workload import parse_workload

workload = parse_workload("""\
object s stack ()
txn T1
  op s EMPTY
end commit
txn T2
  op s POP
end commit
schedule steps T1 T2 T2 T1
""")

result = run_simulated(workload)
print("one reader past an uncommitted reader:\n")
print(result.trace)

# The interesting line is the DEDUCE: T2's POP gets its out-parameters
# (no value, EmptyStack) without an EXEC line and without blocking.
assert result.metrics.deductions == 1
assert result.metrics.blocks == 0

# The same mechanism works when results disagree with intent. Inserting an
# element that is already present reports AlreadyIn; a concurrent second
# insert of the same element can only ever see it present, whichever way
# the first transaction ends, so its answer is deducible too.
workload = parse_workload("""\
object s set x
txn T1
  op s INSERT x
end commit
txn T2
  op s INSERT x
  op s IN x
end commit
schedule steps T1 T2 T2 T1 T2
""")

result = run_simulated(workload)
print("a duplicate insert deduced from a pending duplicate insert:\n")
print(result.trace)
assert result.metrics.deductions == 2

# Deduction is not a free pass: an answer that pins the state blocks later
# writers. CARD reports the exact size, so an INSERT arriving under it has
# to wait for the counting transaction to finish.
workload = parse_workload("""\
object s set x
txn T1
  op s CARD
end commit
txn T2
  op s INSERT y
end commit
schedule steps T1 T2 T1 T2 T2
""")

result = run_simulated(workload)
print("a size query forces a later insert to wait:\n")
print(result.trace)
assert result.metrics.blocks == 1
assert result.metrics.wakeups == 1
