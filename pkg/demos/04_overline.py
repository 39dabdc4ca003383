"""The overline presentation: q = 1 plus P = 1 for P outside the class of 1.

Run with ``python demos/04_overline.py``.
"""

# %% Census first; only seeds whose class is certified contribute rows.
from divseq.dynamics import NONZERO, Budget, SequenceParams, census
from divseq.presentation import build_overline

params = SequenceParams(3, 2, NONZERO)
part = census(params, (-60, 60))
oh = build_overline(params, part)
s = oh.summary()
print("certified rows:", s["certified_rows"], " status:", s["status"])
print("quotient:", s["quotient"])

# %% With unresolved seeds, rows can be added as hypotheses on request.
params = SequenceParams(5, 2)
part = census(params, (1, 40), Budget(2000, 10**18))
oh = build_overline(params, part, allow_hypotheses=True)
print("hypothesis rows:", [r.value for r in oh.hypothesis_rows])
print("overall status:", oh.summary()["status"])
