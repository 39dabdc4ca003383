"""Truncated presentations built from harvested defining relations.

The abelian group H(p, q) is F modulo ``q = 1`` and ``P = Q`` whenever
``P ~ Q``.  Abelianization is implicit in the exponent-vector encoding,
and ``P ~ Q`` is generated by one-step relations, so a harvest only needs
the rows ``vec(q)`` and ``vec(p*c + 1) - vec(c)`` for ``q`` not dividing
``c`` (division steps give multiples of ``vec(q)``).

Any finite harvest spans a sublattice of the true kernel.  Membership
certificates are therefore sound, while a negative answer only means
"not derivable at this truncation".
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property

from .dynamics import NONZERO, Budget, SequenceParams, in_domain
from .errors import (
    BasisExceeded,
    BasisMismatch,
    DivseqError,
    InvalidCertificate,
    MissingComponentOfOne,
)
from .lattice import MembershipCertificate, RelationMatrix, hnf, membership, snf_quotient
from .numth import ExponentVector, PrimeBasis, factor, vec_add, vec_scale, vec_sub

log = logging.getLogger(__name__)

__all__ = [
    "HarvestConfig",
    "RelationProvenance",
    "PresentationHandle",
    "KernelCertificate",
    "Unknown",
    "PresentationReport",
    "OverlineRow",
    "OverlineHandle",
    "harvest",
    "kernel_member",
    "quotient_report",
    "build_overline",
    "CERTIFIED",
    "HYPOTHESIS",
]

CERTIFIED = "Certified"
HYPOTHESIS = "Hypothesis"

Q_IS_ONE = "QIsOne"
ORBIT_STEP = "OrbitStep"
SIGN_SQUARED = "SignSquared"


@dataclass(frozen=True)
class HarvestConfig:
    """How much of the countable relation set to collect.

    ``prime_bound=None`` selects the adaptive basis; an integer fixes the
    basis to the primes up to that bound and drops rows needing others.
    """

    seed_bound: int = 1
    trajectory_depth: int = 0
    budget: Budget = field(default_factory=Budget)
    prime_bound: int | None = None

    def __post_init__(self):
        if self.seed_bound < 0 or self.trajectory_depth < 0:
            raise ValueError("seed_bound and trajectory_depth must be >= 0")

    @property
    def adaptive(self):
        return self.prime_bound is None

    def to_json(self):
        return {
            "seed_bound": self.seed_bound,
            "trajectory_depth": self.trajectory_depth,
            "max_steps": self.budget.max_steps,
            "max_magnitude": self.budget.max_magnitude,
            "basis": "adaptive" if self.adaptive else {"prime_bound": self.prime_bound},
        }


@dataclass(frozen=True)
class RelationProvenance:
    """Where a relation row comes from; enough to recompute it exactly."""

    kind: str
    c: int | None = None

    def vector(self, params, basis, allow_extend=True):
        """The relation as an element of F (sign reduced mod 2)."""
        if self.kind == Q_IS_ONE:
            return factor(params.q, basis, allow_extend)
        if self.kind == SIGN_SQUARED:
            return ExponentVector.identity(basis)
        if self.kind == ORBIT_STEP:
            c = self.c
            if c is None or c == 0 or c % abs(params.q) == 0:
                raise InvalidCertificate(f"OrbitStep({c}) is not a multiplication step")
            img = params.p * c + 1
            if img == 0 or not in_domain(img, params.domain) or not in_domain(c, params.domain):
                raise InvalidCertificate(f"OrbitStep({c}) leaves the domain")
            return vec_sub(factor(img, basis, allow_extend), factor(c, basis, allow_extend))
        raise InvalidCertificate(f"unknown relation kind {self.kind!r}")

    def columns(self, params, basis, allow_extend=True):
        """Sparse lattice row with the sign coordinate lifted to Z."""
        if self.kind == SIGN_SQUARED:
            return {0: 2}
        if self.kind == Q_IS_ONE:
            return factor(params.q, basis, allow_extend).columns()
        vec_img = factor(params.p * self.c + 1, basis, allow_extend).columns()
        vec_c = factor(self.c, basis, allow_extend).columns()
        out = dict(vec_img)
        for k, v in vec_c.items():
            s = out.get(k, 0) - v
            if s:
                out[k] = s
            else:
                out.pop(k)
        return out

    def to_json(self):
        d = {"kind": self.kind}
        if self.c is not None:
            d["c"] = self.c
        return d

    @classmethod
    def from_json(cls, d):
        return cls(d["kind"], d.get("c"))

    def __str__(self):
        return f"{self.kind}({self.c})" if self.c is not None else self.kind


def _canonical_rows(c_values):
    return sorted(set(c_values), key=lambda c: (abs(c), c))


def _new_basis(params, config, basis):
    sign = params.domain == NONZERO
    if basis is not None:
        if basis.includes_sign != sign:
            raise BasisMismatch("basis sign slot does not match the domain")
        return basis
    if config.adaptive:
        return PrimeBasis(includes_sign=sign)
    return PrimeBasis.up_to(config.prime_bound, includes_sign=sign)


class PresentationHandle:
    """A harvested truncation of H(p, q): basis, relation rows, lazy Hermite form."""

    def __init__(self, params, config, basis, provenance, vectors, columns, excluded):
        self.params = params
        self.config = config
        self.basis = basis
        self.provenance = list(provenance)
        self.vectors = list(vectors)
        self.excluded = list(excluded)
        self.width = basis.width
        self.matrix = RelationMatrix(list(columns), self.width, self.provenance)
        self.row_of = {pr.c: i for i, pr in enumerate(self.provenance) if pr.kind == ORBIT_STEP}
        self.q_row = next((i for i, pr in enumerate(self.provenance) if pr.kind == Q_IS_ONE), None)
        self.sign_row = next(
            (i for i, pr in enumerate(self.provenance) if pr.kind == SIGN_SQUARED), None
        )

    @cached_property
    def hnf(self):
        return hnf(self.matrix)

    @property
    def primes(self):
        return self.basis.primes[: self.width - self.basis.offset]

    def __len__(self):
        return len(self.provenance)

    def rows_by_prime(self):
        return [v.by_prime() for v in self.vectors]

    def replay_rows(self):
        """Recompute every row from its provenance and compare."""
        for pr, cols in zip(self.provenance, self.matrix.rows):
            if pr.columns(self.params, self.basis, allow_extend=False) != cols:
                return False
        return True


def _walk_multiplication_steps(seed, params, depth, max_mag, seen):
    # yields c values with q not dividing c along the first `depth` steps;
    # seen[v] is the largest remaining depth already walked from v
    aq = abs(params.q)
    cur, remaining = seed, depth
    while remaining > 0:
        if seen.get(cur, -1) >= remaining:
            return
        seen[cur] = remaining
        if cur % aq:
            nxt = params.p * cur + 1
            if nxt == 0 or not in_domain(nxt, params.domain):
                return
            yield cur
        else:
            nxt = cur // params.q
        if abs(nxt) > max_mag:
            return
        cur, remaining = nxt, remaining - 1


def harvest(params, config=None, basis=None):
    """Collect relation rows for a truncation of H(p, q).

    Rows, in canonical order: ``vec(q)``, the sign relation (nonzero
    domain only), then one-step relations ``vec(p*c+1) - vec(c)`` sorted
    by ``(|c|, c)``.  With a fixed prime bound, rows needing larger primes
    are dropped and recorded in ``excluded``; they are never projected.
    """
    config = config or HarvestConfig()
    basis = _new_basis(params, config, basis)
    allow = config.adaptive
    aq = abs(params.q)
    N = config.seed_bound

    seeds = [c for c in range(-N, N + 1) if c and in_domain(c, params.domain)]
    cs = set()
    for c in seeds:
        if c % aq:
            img = params.p * c + 1
            if img == 0 or not in_domain(img, params.domain):
                log.info("skipping c=%d: p*c+1=%d leaves the domain", c, img)
                continue
            cs.add(c)
    if config.trajectory_depth:
        seen = {}
        for s in sorted(seeds, key=lambda c: (abs(c), c)):
            cs.update(_walk_multiplication_steps(
                s, params, config.trajectory_depth, config.budget.max_magnitude, seen))

    candidates = [RelationProvenance(Q_IS_ONE)]
    if params.domain == NONZERO:
        candidates.append(RelationProvenance(SIGN_SQUARED))
    candidates += [RelationProvenance(ORBIT_STEP, c) for c in _canonical_rows(cs)]

    provenance, vectors, columns, excluded = [], [], [], []
    for pr in candidates:
        try:
            vec = pr.vector(params, basis, allow)
            cols = pr.columns(params, basis, allow)
        except BasisExceeded as exc:
            log.info("excluding %s: cofactor %d outside the prime bound", pr, exc.cofactor)
            excluded.append((pr, exc.cofactor))
            continue
        provenance.append(pr)
        vectors.append(vec)
        columns.append(cols)
    return PresentationHandle(params, config, basis, provenance, vectors, columns, excluded)


@dataclass(frozen=True)
class Unknown:
    """Membership not derivable from the harvested relations."""

    element: int
    diagnostic: str

    def __bool__(self):
        return False

    def to_json(self):
        return {"result": "unknown", "element": self.element, "diagnostic": self.diagnostic}


@dataclass(frozen=True)
class KernelCertificate:
    """Self-contained witness that ``element`` lies in the kernel of H(p, q).

    ``terms`` lists ``(coefficient, provenance)`` pairs; :meth:`replay`
    recomputes every relation from scratch and checks that the combination
    equals ``vec(element)`` in F.  ``rows`` is the same combination
    indexed by the rows of the handle that produced it.
    """

    p: int
    q: int
    domain: str
    element: int
    terms: tuple
    method: str = "hnf"
    rows: dict | None = None

    def __bool__(self):
        return True

    @property
    def params(self):
        return SequenceParams(self.p, self.q, self.domain, allow_unusual=True)

    def combination(self, basis=None):
        if basis is None:
            basis = PrimeBasis(includes_sign=self.domain == NONZERO)
        total = ExponentVector.identity(basis)
        params = self.params
        for k, pr in self.terms:
            total = vec_add(total, vec_scale(pr.vector(params, basis), k))
        return total

    def replay(self):
        """True iff the combination of recomputed relations equals vec(element)."""
        try:
            if not in_domain(self.element, self.domain):
                return False
            basis = PrimeBasis(includes_sign=self.domain == NONZERO)
            return self.combination(basis) == factor(self.element, basis)
        except DivseqError:
            return False

    def plus(self, other):
        """Certificate for the product of the two elements (coefficient-wise sum)."""
        if (self.p, self.q, self.domain) != (other.p, other.q, other.domain):
            raise ValueError("certificates belong to different presentations")
        acc = {}
        for k, pr in list(self.terms) + list(other.terms):
            acc[pr] = acc.get(pr, 0) + k
        terms = tuple((k, pr) for pr, k in _sorted_terms(acc) if k)
        return KernelCertificate(self.p, self.q, self.domain, self.element * other.element,
                                 terms, "sum")

    def coefficient_map(self):
        return {pr: k for k, pr in self.terms}

    def to_json(self):
        d = {
            "p": self.p,
            "q": self.q,
            "domain": self.domain,
            "element": self.element,
            "method": self.method,
            "terms": [{"coefficient": k, **pr.to_json()} for k, pr in self.terms],
        }
        return d

    @classmethod
    def from_json(cls, d):
        terms = tuple(
            (int(t["coefficient"]), RelationProvenance(t["kind"], t.get("c"))) for t in d["terms"]
        )
        return cls(int(d["p"]), int(d["q"]), d["domain"], int(d["element"]), terms,
                   d.get("method", "hnf"))


def _sorted_terms(acc):
    order = {Q_IS_ONE: 0, SIGN_SQUARED: 1, ORBIT_STEP: 2}
    return sorted(acc.items(), key=lambda kv: (order[kv[0].kind], abs(kv[0].c or 0), kv[0].c or 0))


def _certificate_from_rows(x, h, coeffs, method):
    acc = {}
    for i, k in coeffs.items():
        if k:
            acc[h.provenance[i]] = acc.get(h.provenance[i], 0) + k
    terms = tuple((k, pr) for pr, k in _sorted_terms(acc) if k)
    p = h.params
    return KernelCertificate(p.p, p.q, p.domain, x, terms, method,
                             {i: k for i, k in sorted(coeffs.items()) if k})


def _walk(seed, params, budget, stop=None):
    path = [seed]
    index = {seed: 0}
    cur = seed
    aq = abs(params.q)
    for _ in range(budget.max_steps):
        if stop is not None and cur in stop:
            return path, cur
        nxt = cur // params.q if cur % aq == 0 else params.p * cur + 1
        if nxt == 0 or not in_domain(nxt, params.domain) or abs(nxt) > budget.max_magnitude:
            break
        if nxt in index:
            return path, None
        index[nxt] = len(path)
        path.append(nxt)
        cur = nxt
    if stop is not None and cur in stop:
        return path, cur
    return path, None


def _step_coeffs(path, h, sign):
    # coefficients expressing vec(path[0]) - vec(path[-1]) over the rows
    aq = abs(h.params.q)
    coeffs = {}
    for a in path[:-1]:
        if a % aq == 0:
            if h.q_row is None:
                return None
            coeffs[h.q_row] = coeffs.get(h.q_row, 0) + sign
        else:
            i = h.row_of.get(a)
            if i is None:
                return None
            coeffs[i] = coeffs.get(i, 0) - sign
    return coeffs


def _telescope(x, h, target):
    params, budget = h.params, h.config.budget
    one_path, _ = _walk(1, params, budget)
    one_index = {v: i for i, v in enumerate(one_path)}
    x_path, meet = _walk(x, params, budget, stop=one_index)
    if meet is None:
        return None
    a = _step_coeffs(x_path, h, 1)
    b = _step_coeffs(one_path[: one_index[meet] + 1], h, -1)
    if a is None or b is None:
        return None
    coeffs = dict(a)
    for i, k in b.items():
        coeffs[i] = coeffs.get(i, 0) + k
    coeffs = {i: k for i, k in coeffs.items() if k}
    got = {}
    for i, k in coeffs.items():
        for c, v in h.matrix.rows[i].items():
            got[c] = got.get(c, 0) + k * v
    diff = {c: target.get(c, 0) - got.get(c, 0) for c in set(got) | set(target)}
    diff = {c: v for c, v in diff.items() if v}
    if diff:
        # only an even sign discrepancy can remain; absorb it with the sign row
        if set(diff) != {0} or diff[0] % 2 or h.sign_row is None:
            return None
        coeffs[h.sign_row] = coeffs.get(h.sign_row, 0) + diff[0] // 2
        coeffs = {i: k for i, k in coeffs.items() if k}
    return coeffs


def kernel_member(x, h):
    """Certify ``x`` in the kernel of H(p, q) from the harvested rows.

    Tries a telescoping certificate along the orbits of ``x`` and ``1``
    first, then Hermite-form membership.  Returns a
    :class:`KernelCertificate` or :class:`Unknown`.
    """
    if not in_domain(x, h.params.domain):
        raise ValueError(f"{x} is not in the domain {h.params.domain}")
    try:
        vec = factor(x, h.basis, allow_extend=False)
    except BasisExceeded as exc:
        return Unknown(x, f"prime cofactor {exc.cofactor} is outside the harvested basis")
    if vec.max_index() + h.basis.offset >= h.width:
        return Unknown(x, "element uses primes added after this harvest")
    target = vec.columns()
    if not target:
        return _certificate_from_rows(x, h, {}, "identity")
    coeffs = _telescope(x, h, target)
    method = "telescope"
    if coeffs is None:
        cert = membership(target, h.hnf)
        if cert is None:
            return Unknown(x, "not in the span of the harvested relations")
        coeffs, method = cert.coefficients, "hnf"
    out = _certificate_from_rows(x, h, coeffs, method)
    if not MembershipCertificate(out.rows, target).replay(h.matrix):  # pragma: no cover
        raise InvalidCertificate(f"certificate for {x} failed to replay")
    return out


@dataclass(frozen=True)
class PresentationReport:
    """Smith structure of the truncated quotient plus per-prime kernel flags.

    The subgroup of H generated by the basis primes is a quotient of the
    truncated group ``T``; in particular a trivial ``T`` certifies every
    basis prime as a kernel member.
    """

    params: SequenceParams
    primes: tuple
    rows: int
    excluded: int
    quotient: object
    kernel_flags: dict
    truncated: bool = True

    def to_json(self):
        return {
            "params": {"p": self.params.p, "q": self.params.q, "domain": self.params.domain},
            "basis": list(self.primes),
            "rows": self.rows,
            "excluded_rows": self.excluded,
            "quotient": self.quotient.to_json(),
            "kernel_flags": {str(p): f for p, f in sorted(self.kernel_flags.items())},
            "truncated": self.truncated,
            "caveat": "relations outside the harvested range may collapse the quotient further",
        }


def quotient_report(h, report_bound=None):
    """Smith invariants of the truncated quotient and kernel flags per prime."""
    basis = h.hnf
    rep = snf_quotient(h.matrix, h.width, basis)
    flags = {}
    for i, p in enumerate(h.primes):
        if report_bound is not None and p > report_bound:
            continue
        col = i + h.basis.offset
        flags[p] = membership({col: 1}, basis) is not None
    return PresentationReport(h.params, h.primes, len(h), len(h.excluded), rep, flags)


@dataclass(frozen=True)
class OverlineRow:
    value: int
    vector: ExponentVector
    status: str
    witnesses: tuple = ()

    def to_json(self):
        return {
            "value": self.value,
            "status": self.status,
            "witnesses": [list(c.members) for c in self.witnesses],
        }


class OverlineHandle:
    """Truncation of the overline group: ``q = 1`` plus ``P = 1`` for ``P`` not ~ 1."""

    def __init__(self, params, basis, base_rows, rows, partition_id, excluded):
        self.params = params
        self.basis = basis
        self.base_rows = list(base_rows)
        self.rows = list(rows)
        self.partition_id = partition_id
        self.excluded = list(excluded)
        self.width = basis.width

    @property
    def certified_rows(self):
        return [r for r in self.rows if r.status == CERTIFIED]

    @property
    def hypothesis_rows(self):
        return [r for r in self.rows if r.status == HYPOTHESIS]

    @property
    def conditional(self):
        return bool(self.hypothesis_rows)

    def matrix(self):
        cols = [c for _, c in self.base_rows] + [r.vector.columns() for r in self.rows]
        prov = [pr for pr, _ in self.base_rows] + [r.value for r in self.rows]
        return RelationMatrix(cols, self.width, prov)

    def quotient(self):
        return snf_quotient(self.matrix(), self.width)

    def summary(self):
        return {
            "params": {"p": self.params.p, "q": self.params.q, "domain": self.params.domain},
            "partition": self.partition_id,
            "basis": list(self.basis.primes),
            "base_rows": [str(pr) for pr, _ in self.base_rows],
            "certified_rows": len(self.certified_rows),
            "hypothesis_rows": len(self.hypothesis_rows),
            "status": "Conditional" if self.conditional else CERTIFIED,
            "rows": [r.to_json() for r in self.rows],
            "excluded": [v for v, _ in self.excluded],
            "quotient": self.quotient().to_json(),
        }


def partition_id(partition):
    doc = json.dumps(partition.summary(), sort_keys=True, default=str)
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


def build_overline(params, partition, config=None, allow_hypotheses=False, basis=None):
    """Relations ``P = 1`` for seeds whose certified class differs from that of 1.

    Only seeds resolved by the census contribute Certified rows, each
    carrying its own cycle and the cycle of 1 as witnesses.  Unresolved
    seeds become Hypothesis rows only when ``allow_hypotheses`` is set.
    """
    config = config or HarvestConfig()
    if partition.params.key() != params.key():
        raise ValueError("partition was computed for different parameters")
    one = partition.cycle_of(1)
    if one is None:
        raise MissingComponentOfOne("1 is not resolved in the partition")
    basis = _new_basis(params, config, basis)
    allow = config.adaptive
    base = [RelationProvenance(Q_IS_ONE)]
    if params.domain == NONZERO:
        base.append(RelationProvenance(SIGN_SQUARED))
    base_rows, excluded = [], []
    for pr in base:
        try:
            base_rows.append((pr, pr.columns(params, basis, allow)))
        except BasisExceeded as exc:
            excluded.append((pr, exc.cofactor))
    one_cycle = partition.cycles[one]
    rows = []
    for s in sorted(partition.resolution, key=lambda c: (abs(c), c)):
        r = partition.resolution[s]
        if isinstance(r, str):
            if r == one:
                continue
            status, wit = CERTIFIED, (partition.cycles[r], one_cycle)
        elif allow_hypotheses:
            status, wit = HYPOTHESIS, ()
        else:
            continue
        try:
            vec = factor(s, basis, allow)
        except BasisExceeded as exc:
            log.info("excluding overline row for %d: cofactor %d", s, exc.cofactor)
            excluded.append((s, exc.cofactor))
            continue
        rows.append(OverlineRow(s, vec, status, wit))
    return OverlineHandle(params, basis, base_rows, rows, partition_id(partition), excluded)
