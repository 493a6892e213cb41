"""The lone primary: least bandwidth that keeps its queue stable.

Run:  python demos/02_lone_primary_baseline.py
"""

import numpy as np

from energycoop import SystemParams
from energycoop.baseline import noncoop_optimize

p = SystemParams()
print(f"best possible service rate (whole band): {noncoop_optimize(p).mu_max:.5f} packets/slot\n")

# Energy per packet is minimized by the narrowest band that still serves
# the arrival rate.  Beyond mu_max no bandwidth suffices.
print("lambda_p   W_opt (MHz)   packets per joule")
for lam in np.arange(0.1, 0.95, 0.1):
    rep = noncoop_optimize(p.with_(lambda_p=float(lam)))
    if rep.feasible:
        print(f"{lam:8.1f}   {rep.W_opt / 1e6:11.3f}   {rep.B_max:.4e}")
    else:
        print(f"{lam:8.1f}   {'unstable':>11}")
