"""Integer relation lattices: Hermite form, membership certificates, Smith form.

Rows are sparse ``{column: value}`` dicts over ``range(width)``.  The
Hermite basis is echelon *from the right*: each basis row's pivot is its
highest nonzero column, the pivot is positive, and every other basis row
carries an entry in ``[0, pivot)`` at that column.  That form is unique
for a lattice, so it does not depend on the order rows were supplied.
Working from the right keeps fill-in low for harvested relations, whose
highest columns are usually large, rarely shared primes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

from .errors import BasisMismatch, SizeGuardError

__all__ = [
    "RelationMatrix",
    "HNFBasis",
    "MembershipCertificate",
    "QuotientReport",
    "hnf",
    "membership",
    "snf_quotient",
    "smith_diagonal",
    "combine_rows",
]

MAX_DIGITS = 10**6
_MAX_BITS = int(MAX_DIGITS * 3.3219280948873626) + 1


def _guard(x):
    if x.bit_length() > _MAX_BITS:
        raise SizeGuardError(f"integer entry exceeds {MAX_DIGITS} decimal digits")
    return x


def _axpy(y, k, x):
    """Return ``y + k * x`` for sparse dicts, dropping zeros."""
    if not k:
        return dict(y)
    out = dict(y)
    for c, v in x.items():
        s = out.get(c, 0) + k * v
        if s:
            out[c] = _guard(s)
        else:
            out.pop(c, None)
    return out


def _lin2(a, x, b, y):
    """Return ``a * x + b * y`` for sparse dicts."""
    out = {}
    for c, v in x.items():
        out[c] = a * v
    for c, v in y.items():
        out[c] = out.get(c, 0) + b * v
    return {c: _guard(v) for c, v in out.items() if v}


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def combine_rows(coefficients, rows):
    """Sparse sum ``sum(k * rows[i] for i, k in coefficients.items())``."""
    out = {}
    for i, k in coefficients.items():
        for c, v in rows[i].items():
            out[c] = out.get(c, 0) + k * v
    return {c: v for c, v in out.items() if v}


@dataclass
class RelationMatrix:
    """Relation rows over a common ambient width, each with a provenance tag."""

    rows: list = field(default_factory=list)
    width: int = 0
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        self.rows = [{c: v for c, v in r.items() if v} for r in self.rows]
        if not self.provenance:
            self.provenance = [None] * len(self.rows)
        if len(self.provenance) != len(self.rows):
            raise ValueError("provenance length must equal row count")
        for r in self.rows:
            if r and (max(r) >= self.width or min(r) < 0):
                raise BasisMismatch("row has a column outside the ambient width")

    @classmethod
    def from_dense(cls, rows, width=None):
        if width is None:
            width = len(rows[0]) if rows else 0
        return cls([{j: v for j, v in enumerate(r) if v} for r in rows], width)

    @classmethod
    def from_vectors(cls, vectors, width, provenance=None):
        return cls([v.columns() for v in vectors], width, list(provenance or []))

    def __len__(self):
        return len(self.rows)

    def dense(self):
        return [[r.get(j, 0) for j in range(self.width)] for r in self.rows]


@dataclass(frozen=True)
class MembershipCertificate:
    """Integer combination of original rows that equals ``target``."""

    coefficients: dict
    target: dict

    def replay(self, relations):
        """Recompute the combination against ``relations``; True iff exact."""
        if any(i < 0 or i >= len(relations.rows) for i in self.coefficients):
            return False
        got = combine_rows(self.coefficients, relations.rows)
        want = {c: v for c, v in self.target.items() if v}
        return got == want

    def to_json(self):
        return {
            "coefficients": {str(i): k for i, k in sorted(self.coefficients.items())},
            "target": {str(c): v for c, v in sorted(self.target.items())},
        }


@dataclass
class HNFBasis:
    """Hermite basis with a transform trail back to the original rows.

    ``rows[k]`` has pivot ``pivots[k]``; ``transforms[k]`` expresses it as
    a combination of the rows of ``source``.
    """

    source: RelationMatrix
    rows: list
    pivots: list
    transforms: list

    @property
    def width(self):
        return self.source.width

    @property
    def rank(self):
        return len(self.rows)

    def pivot_map(self):
        return {j: k for k, j in enumerate(self.pivots)}

    def dense(self):
        w = self.width
        return [[r.get(j, 0) for j in range(w)] for r in self.rows]

    def check_trail(self):
        """Every basis row must equal its recorded combination of sources."""
        return all(
            combine_rows(t, self.source.rows) == r
            for r, t in zip(self.rows, self.transforms)
        )


def _insert(slots, v, t):
    while v:
        j = max(v)
        slot = slots.get(j)
        if slot is None:
            if v[j] < 0:
                v = {c: -x for c, x in v.items()}
                t = {c: -x for c, x in t.items()}
            slots[j] = (v, t)
            return
        b, bt = slot
        a, c = b[j], v[j]
        if c % a == 0:
            k = -(c // a)
            v = _axpy(v, k, b)
            t = _axpy(t, k, bt)
            continue
        g, x, y = _xgcd(a, c)
        nb, nbt = _lin2(x, b, y, v), _lin2(x, bt, y, t)
        v, t = _lin2(c // g, b, -(a // g), v), _lin2(c // g, bt, -(a // g), t)
        slots[j] = (nb, nbt)


def hnf(relations):
    """Hermite basis of the row lattice of ``relations``."""
    slots = {}
    for i, r in enumerate(relations.rows):
        if r:
            _insert(slots, dict(r), {i: 1})
    pivots = sorted(slots, reverse=True)
    rows = {j: slots[j][0] for j in pivots}
    trans = {j: slots[j][1] for j in pivots}
    # occ[c] = pivots of rows holding a nonzero at column c
    occ = {}
    for j, r in rows.items():
        for c in r:
            occ.setdefault(c, set()).add(j)
    for j in pivots:
        a = rows[j][j]
        for J in sorted(occ.get(j, ())):
            if J == j:
                continue
            k = rows[J][j] // a
            if not k:
                continue
            old = rows[J]
            new = _axpy(old, -k, rows[j])
            for c in old:
                if c not in new:
                    occ[c].discard(J)
            for c in new:
                if c not in old:
                    occ.setdefault(c, set()).add(J)
            rows[J] = new
            trans[J] = _axpy(trans[J], -k, trans[j])
    return HNFBasis(relations, [rows[j] for j in pivots], pivots, [trans[j] for j in pivots])


def membership(v, basis):
    """Certificate that sparse vector ``v`` lies in the lattice, else None.

    A None answer is exact for the given rows; for a truncated lattice it
    only means "not derivable from these rows".
    """
    if hasattr(v, "columns"):
        v = v.columns()
    target = {c: x for c, x in v.items() if x}
    if target and (max(target) >= basis.width or min(target) < 0):
        raise BasisMismatch("vector has a column outside the lattice width")
    pm = basis.pivot_map()
    rem = dict(target)
    coeffs = {}
    while rem:
        j = max(rem)
        k = pm.get(j)
        if k is None:
            return None
        row = basis.rows[k]
        a = row[j]
        if rem[j] % a:
            return None
        m = rem[j] // a
        rem = _axpy(rem, -m, row)
        coeffs = _axpy(coeffs, m, basis.transforms[k])
    return MembershipCertificate(coeffs, target)


def _move_to(A, t, i, j):
    A[t], A[i] = A[i], A[t]
    if j != t:
        for r in A:
            r[t], r[j] = r[j], r[t]


def smith_diagonal(matrix):
    """Nonzero Smith invariants of an integer matrix (list of lists).

    Plain row/column reduction; the returned values are positive and each
    divides the next.
    """
    A = [list(r) for r in matrix if any(r)]
    if not A:
        return []
    m, n = len(A), len(A[0])
    diag = []
    for t in range(min(m, n)):
        block = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not block:
            break
        _, i, j = min(block)
        _move_to(A, t, i, j)
        while True:
            p = A[t][t]
            At = A[t]
            changed = False
            for i in range(t + 1, m):
                Ai = A[i]
                if Ai[t]:
                    k = Ai[t] // p
                    for c in range(t, n):
                        Ai[c] = _guard(Ai[c] - k * At[c])
                    changed = changed or bool(Ai[t])
            for j in range(t + 1, n):
                if At[j]:
                    k = At[j] // p
                    for r in A[t:]:
                        r[j] = _guard(r[j] - k * r[t])
                    changed = changed or bool(At[j])
            if changed:
                cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cand += [(abs(At[j]), t, j) for j in range(t + 1, n) if At[j]]
                _, i, j = min(cand)
                _move_to(A, t, i, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) if any(A[i][c] % p for c in range(t + 1, n))),
                None,
            )
            if bad is None:
                break
            Ab = A[bad]
            for c in range(t, n):
                At[c] += Ab[c]
        diag.append(abs(A[t][t]))
    return diag


@dataclass(frozen=True)
class QuotientReport:
    """Structure of ``Z^ambient_rank / rowspan``."""

    ambient_rank: int
    invariant_factors: tuple
    free_rank: int

    @property
    def finite(self):
        return self.free_rank == 0

    @property
    def order(self):
        """Group order, or None when infinite."""
        return prod(self.invariant_factors) if self.finite else None

    @property
    def trivial(self):
        return self.order == 1

    def to_json(self):
        return {
            "ambient_rank": self.ambient_rank,
            "invariant_factors": list(self.invariant_factors),
            "free_rank": self.free_rank,
            "order": self.order if self.finite else "infinite",
        }


def snf_quotient(relations, ambient_rank=None, basis=None):
    """Invariant factors of the quotient of Z^ambient_rank by the row lattice."""
    if ambient_rank is None:
        ambient_rank = relations.width
    if ambient_rank < relations.width and any(
        r and max(r) >= ambient_rank for r in relations.rows
    ):
        raise BasisMismatch("ambient rank smaller than the highest used column")
    basis = basis if basis is not None else hnf(relations)
    mat = basis.dense()
    diag = smith_diagonal([r[:ambient_rank] + [0] * (ambient_rank - len(r)) for r in mat])
    return QuotientReport(ambient_rank, tuple(diag), ambient_rank - len(diag))
