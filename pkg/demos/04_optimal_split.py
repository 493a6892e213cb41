"""Best bandwidth and airtime split for the secondary, across primary loads.

A 51-point grid keeps this quick; the CLI defaults to 200 points per axis.

Run:  python demos/04_optimal_split.py
"""

import numpy as np

from energycoop import OptimizerConfig, SystemParams, optimize
from energycoop.optimizer import optimize_disconnected

cfg = OptimizerConfig(51, 51, 51)
p = SystemParams(M=6, Ps=5e-11)

print("lambda_p  feasible   Wp (MHz)  TpF (us)  TpR (us)   mu_s    B_pc/B_nc")
for lam in np.arange(0.1, 1.0, 0.1):
    opt = optimize(p.with_(lambda_p=float(lam)), cfg)
    if not opt.feasible:
        print(f"{lam:8.1f}  no")
        continue
    a = opt.alloc
    gain = opt.report.B_pc / opt.B_nc
    print(f"{lam:8.1f}  yes{'*' if opt.extended_baseline else ' '}    {a.Wp / 1e6:8.2f}  {a.TpF * 1e6:8.1f}  {a.TpR * 1e6:8.1f}  {opt.mu_s:.4f}  {gain:9.2f}")
print("* lone primary unstable; compared against its saturated full-band value")

# With the primary's direct link gone, only the relay path remains and the
# search collapses to a single variable.
q = SystemParams(sigma_p_pd=1e-12, lambda_p=0.3)
d = optimize_disconnected(q, OptimizerConfig(grid_wp=201))
print(f"\nno direct link, lambda_p=0.3: Wp = {d.alloc.Wp / 1e6:.2f} MHz, TpF = {d.alloc.TpF * 1e6:.1f} us, mu_s = {d.mu_s:.4f}")
