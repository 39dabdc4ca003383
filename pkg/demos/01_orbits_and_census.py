"""Orbits and class censuses.

Run with ``python demos/01_orbits_and_census.py``.
"""

# %% A single orbit of the 3x+1 map, written as c -> c/2 or 3c+1.
from divseq.dynamics import NONZERO, Budget, SequenceParams, census, class_lower_bound, orbit

params = SequenceParams(3, 2)
r = orbit(27, params)
print("27 reaches", r.status.cycle.members, "after", r.status.steps, "steps; peak", max(r.path))

# %% Census over a seed range. Every seed lands on the cycle through 1.
part = census(params, (1, 10_000))
n, cycles = class_lower_bound(part)
print("pos domain 1..10^4:", n, "cycle(s):", [c.members for c in cycles])

# %% Allowing negative integers exposes more cycles, hence more classes.
part = census(SequenceParams(3, 2, NONZERO), (-1000, 1000))
for c in class_lower_bound(part)[1]:
    print("  cycle", c.members)

# %% For 5x+1 many orbits appear to escape. Those seeds stay unresolved and
# never count toward the lower bound.
part = census(SequenceParams(5, 2), (1, 200), Budget(max_steps=2000, max_magnitude=10**18))
s = part.summary()
print("5x+1 on 1..200:", s["lower_bound"], "cycles,", s["unresolved"], "unresolved seeds")
print("first unresolved:", s["unresolved_seeds"][:3])

# %% Parallel shards give the same answer as a single process.
a = census(params, (1, 5000), jobs=1).summary()
b = census(params, (1, 5000), jobs=4).summary()
print("sharding invisible:", a == b)
