"""Rayleigh links, and how many antennas the secondary needs to decode.

Run:  python demos/01_links_and_decoding.py
"""

from energycoop import LinkSpec, ResourceAllocation, SystemParams, min_bandwidth_time_product, mrc_decode_failure, outage_probability
from energycoop.channel import separate_decoding_bound

p = SystemParams()

# A single link: 5 Mbit/s over 10 MHz at 10 dB mean SNR, average gain 0.2.
link = LinkSpec(rate=5e6, bandwidth=1e7, snr=10.0, gain=0.2)
print(f"outage of the example link: {outage_probability(link):.5f}")

# The secondary relays only if it can decode the primary packet almost surely.
# That sets a floor on the bandwidth-time product the primary must spend.
print("\nM   min Wp*TpF   fits in W*T?")
for M in range(1, 11):
    E = min_bandwidth_time_product(p.with_(M=M))
    print(f"{M:<3} {E:12.1f}   {'yes' if E <= p.W * p.T else 'no'}")

# The floor comes from a per-antenna bound.  Summing SNRs (MRC) does better.
alloc = ResourceAllocation(Wp=3e6, TpF=2.5e-4, TpR=0.0)
for M in (2, 4, 7):
    q = p.with_(M=M)
    print(f"M={M}: MRC failure {mrc_decode_failure(q, alloc):.3e}, per-antenna bound {separate_decoding_bound(q, alloc):.3e}")
