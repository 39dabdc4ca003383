"""Harvested presentations and kernel certificates.

Run with ``python demos/03_presentations_and_kernels.py``.
"""

# %% Harvest the relations q = 1 and c = pc + 1 for small c, then ask which
# elements become trivial.
from divseq.dynamics import SequenceParams
from divseq.presentation import HarvestConfig, harvest, kernel_member, quotient_report

for p, q, x in [(7, 2, 8), (7, 16, 8), (5, 2, 6), (5, 12, 6), (3, 2, 4), (3, 8, 4)]:
    h = harvest(SequenceParams(p, q), HarvestConfig(seed_bound=10))
    cert = kernel_member(x, h)
    terms = ", ".join(f"{k:+d}*{pr}" for k, pr in cert.terms)
    print(f"{x} in Ker(H({p},{q})): {terms}   replays={cert.replay()}")

# %% Certificates are self-contained JSON; replay recomputes every relation.
print(cert.to_json())

# %% Without enough relations the answer is "unknown", never "no".
h = harvest(SequenceParams(3, 2), HarvestConfig(seed_bound=1))
print(kernel_member(11, h))

# %% Trajectory harvesting follows orbits and certifies many more primes.
h = harvest(SequenceParams(3, 2), HarvestConfig(seed_bound=2000, trajectory_depth=500))
ok = [p for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29) if kernel_member(p, h)]
print(len(h), "rows over", len(h.primes), "primes; certified primes:", ok)

# %% The truncated quotient and per-prime flags.
rep = quotient_report(harvest(SequenceParams(7, 16), HarvestConfig(seed_bound=1)))
print(rep.to_json())
