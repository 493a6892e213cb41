"""Primary queue under cooperation, in closed form and by simulation.

Run:  python demos/03_primary_queue_chain.py
"""

from energycoop import ResourceAllocation, SystemParams, make_report
from energycoop.simulator import run

p = SystemParams(lambda_p=0.5)
alloc = ResourceAllocation(Wp=9e6, TpF=3e-4, TpR=2e-4)
rep = make_report(p, alloc)
c = rep.chain
print(f"forward success alpha_p = {c.alpha_p:.4f}, retransmission success Gamma_p = {c.Gamma_p:.4f}")
print(f"eta = {c.eta:.4f}, stable: {c.stable}")

# One million slots, with the first 10^4 discarded as warm-up.
st = run(p, alloc, 1_000_000, seed=1, keep_trace=False)
print("\n              closed form   simulated")
print(f"idle          {c.pi0:11.4f}   {st.pi0_hat:9.4f}")
print(f"forward       {c.sum_pi:11.4f}   {st.sum_pi_hat:9.4f}")
print(f"retransmit    {c.sum_eps:11.4f}   {st.sum_eps_hat:9.4f}")
print(f"SU throughput {rep.mu_s:11.4f}   {st.mu_s_hat:9.4f}")
