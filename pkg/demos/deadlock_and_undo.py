# Deadlock resolution and abort by inverse operations.
#
# Locks are conflict edges here, not mutexes, but the classic crossed
# acquisition order still deadlocks: T1 touches stack A then stack B, T2
# touches B then A, and once both first pushes have executed each
# transaction blocks behind the other. The manager finds the cycle in the
# waits-for graph, kills the youngest transaction on it, and undoes that
# transaction's executed work by applying inverse operations.

from adtxn.oracles import check_serializable
from adtxn.simulate import run_simulated
from adtxn.workload import parse_workload

workload = parse_workload("""\
object A stack ()
object B stack ()
txn T1
  op A PUSH a
  op B PUSH b
end commit
txn T2
  op B PUSH c
  op A PUSH d
end commit
schedule steps T1 T2 T1 T2 T1 T1
""")

result = run_simulated(workload)
print("crossed lock order:\n")
print(result.trace)

# VICTIM marks the choice (T2, the younger), WITHDRAW retracts its blocked
# push, and the INVERSE line is a real POP executed against B to cancel the
# push that had already run. T1 then wakes and finishes normally.
assert result.metrics.victims == 1
assert result.statuses["T2"].value == "aborted"
print("final states:", result.rendered_states())
print("serializable:", check_serializable(result).ok)
print()

# Undo is exact and runs in reverse order. One transaction below mutates a
# stack six ways and then aborts; the inverse walk pops what was pushed,
# restores what CLEAR threw away, and re-pushes what POP removed, ending in
# the starting state. EMPTY contributes no inverse because reading costs
# nothing to take back.
workload = parse_workload("""\
object s stack a,b
txn T1
  op s PUSH c
  op s POP
  op s POP
  op s CLEAR
  op s EMPTY
  op s PUSH z
end abort
schedule steps T1 T1 T1 T1 T1 T1 T1
""")

result = run_simulated(workload)
print("a six-op transaction unwinding itself:\n")
print(result.trace)
undone = [e.op for e in result.history if e.kind == "INVERSE"]
print("inverse walk:", " -> ".join(undone))
print("final state:", result.rendered_states()["s"], "(started as a,b)")
assert result.rendered_states() == {"s": "a,b"}
