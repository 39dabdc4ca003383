"""Chaining certificates through the rule engine.

Run with ``python demos/05_deduction.py``.
"""

# %% Assert six certified kernel memberships.
from divseq.deduce import (
    FactStore,
    apply_rules,
    assert_fact,
    dumps_store,
    kernel_fact,
    loads_store,
    parse_statement,
    query,
)
from divseq.dynamics import SequenceParams
from divseq.presentation import HarvestConfig, harvest, kernel_member

store = FactStore()
for p, q, x in [(7, 2, 8), (7, 16, 8), (5, 2, 6), (5, 12, 6), (3, 2, 4), (3, 8, 4)]:
    h = harvest(SequenceParams(p, q), HarvestConfig(seed_bound=10))
    assert_fact(store, kernel_fact(kernel_member(x, h)))

# %% A hypothesis: the 3x+1 map has a single class on the positive integers.
assert_fact(store, parse_statement("SingleClass(C(3,2,pos))"))

# %% Run the rules to a fixpoint.
new = apply_rules(store)
print(len(new), "facts derived")
for hit in query(store, "QuotientOf(H(5,12), ?)"):
    f = hit["fact"]
    print(f"  #{f['id']} {f['text']:45s} {f['status']:12s} via {f['derivation']['rule']}")

# %% Facts resting on a hypothesis are Conditional and say on what.
for hit in query(store, "OrderAtMost(?, ?)"):
    print(hit["fact"]["text"], hit["fact"]["status"], "on", hit["fact"]["conditional_on"])

# %% Derivation trees go down to the leaf certificates.
tree = query(store, "QuotientOf(H(7,16), H(7,2))")[0]["tree"]
print(tree["rule"], [p["text"] for p in tree["premises"]])

# %% The store persists as canonical JSON and re-validates on load.
text = dumps_store(store)
print("round trip identical:", dumps_store(loads_store(text)) == text)
