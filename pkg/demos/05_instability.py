"""What an unstable primary queue looks like in simulation.

With TpF = TpR both states share one success probability, and a queue
that never empties grows by lambda_p - eta packets per slot.

Run:  python demos/05_instability.py
"""

from energycoop import ResourceAllocation, SystemParams, make_report
from energycoop.simulator import queue_drift, run

p = SystemParams(lambda_p=0.95)
alloc = ResourceAllocation(Wp=7e6, TpF=4e-4, TpR=4e-4)
eta = make_report(p, alloc).chain.eta
st = run(p, alloc, 200_000, seed=3, warmup=0)
print(f"eta = {eta:.4f}; predicted growth {p.lambda_p - eta:.4f}, fitted {queue_drift(st):.4f} packets/slot")
print(f"queue length after {st.slots} slots: {st.final_queues.Qp}")
print("Pr{Qp > y}:", {y: round(v, 3) for y, v in st.queue_tail.items()})
