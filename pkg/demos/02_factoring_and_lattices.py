"""Exponent vectors, Hermite and Smith forms.

Run with ``python demos/02_factoring_and_lattices.py``.
"""

# %% Integers embed in a free abelian group through their exponent vectors.
from divseq.lattice import RelationMatrix, hnf, membership, snf_quotient
from divseq.numth import PrimeBasis, factor, unfactor

basis = PrimeBasis(includes_sign=True)
v = factor(-360, basis)
w = factor(77, basis)
print("-360 ->", v, "  77 ->", w)
print("(-360)/77 back from its vector:", unfactor(v - w))
print("basis grows on demand:", basis.primes)

# %% A relation lattice and its Hermite basis (pivots at the right).
rm = RelationMatrix.from_dense([[4, 6, 0], [2, 2, 2], [0, 3, 9]])
b = hnf(rm)
for row in b.dense():
    print("  ", row)

# %% Membership comes with a certificate: a combination of the original rows.
cert = membership({0: 6, 1: 8, 2: 2}, b)
print("coefficients over original rows:", cert.coefficients, "replays:", cert.replay(rm))
print("(1, 0, 0) in lattice?", membership({0: 1}, b) is not None)

# %% The Smith form gives the quotient group's structure.
rep = snf_quotient(rm)
print("Z^3 / lattice has invariant factors", rep.invariant_factors, "and order", rep.order)
