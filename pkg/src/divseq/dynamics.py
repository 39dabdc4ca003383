"""Division-sequence dynamics: the map, orbits, cycles and class census.

The map sends ``c`` to ``c / q`` when ``|q|`` divides ``c`` and to
``p * c + 1`` otherwise.  Every weakly connected component of its
functional graph holds at most one cycle, so distinct cycles found by a
census certify distinct equivalence classes.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import DomainViolation, InvalidParams

__all__ = [
    "POSITIVE",
    "NONZERO",
    "SequenceParams",
    "Budget",
    "Cycle",
    "OrbitResult",
    "ReachedCycle",
    "BudgetExceeded",
    "MagnitudeExceeded",
    "DomainViolationStatus",
    "ClassPartition",
    "UnionFind",
    "step",
    "orbit",
    "census",
    "class_lower_bound",
    "in_domain",
]

POSITIVE = "pos"
NONZERO = "nonzero"
DOMAINS = (POSITIVE, NONZERO)

DEFAULT_MAX_STEPS = 10**5
DEFAULT_MAX_MAGNITUDE = 10**36


def in_domain(c, domain):
    return c > 0 if domain == POSITIVE else c != 0


@dataclass(frozen=True)
class SequenceParams:
    """Parameters ``p``, ``q`` and domain of a division sequence.

    By default ``p >= 1`` and ``|q| >= 2``.  ``allow_unusual`` admits any
    ``p, q`` in the domain; degenerate steps then surface as
    :class:`DomainViolation`.
    """

    p: int
    q: int
    domain: str = POSITIVE
    allow_unusual: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise InvalidParams(f"unknown domain {self.domain!r}")
        if self.allow_unusual:
            for name, v in (("p", self.p), ("q", self.q)):
                if not in_domain(v, self.domain):
                    raise InvalidParams(f"{name}={v} is not in the domain")
        else:
            if self.p < 1:
                raise InvalidParams(f"p={self.p} must be >= 1")
            if abs(self.q) < 2:
                raise InvalidParams(f"|q| must be >= 2, got q={self.q}")
            if self.q < 0 and self.domain == POSITIVE:
                raise InvalidParams("negative q requires the nonzero domain")

    def key(self):
        return (self.p, self.q, self.domain)


@dataclass(frozen=True)
class Budget:
    max_steps: int = DEFAULT_MAX_STEPS
    max_magnitude: int = DEFAULT_MAX_MAGNITUDE

    def __post_init__(self):
        if self.max_steps < 1 or self.max_magnitude < 1:
            raise InvalidParams("budget limits must be >= 1")


def step(c, params):
    """One application of the map; raises DomainViolation on leaving M."""
    if not in_domain(c, params.domain):
        raise DomainViolation(c)
    q = params.q
    if c % abs(q) == 0:
        nxt = c // q
    else:
        nxt = params.p * c + 1
    if not in_domain(nxt, params.domain):
        raise DomainViolation(nxt)
    return nxt


def _canonical_rotation(members):
    k = members.index(min(members))
    return tuple(members[k:] + members[:k])


def _cycle_id(members):
    digest = hashlib.sha256(",".join(map(str, members)).encode()).hexdigest()
    return digest[:16]


@dataclass(frozen=True)
class Cycle:
    members: tuple
    id: str

    @classmethod
    def from_members(cls, members):
        canon = _canonical_rotation(list(members))
        return cls(canon, _cycle_id(canon))

    def __len__(self):
        return len(self.members)

    def verify(self, params):
        """Check that the map permutes the members cyclically."""
        m = self.members
        if len(set(m)) != len(m) or not m:
            return False
        if _canonical_rotation(list(m)) != m or _cycle_id(m) != self.id:
            return False
        try:
            return all(step(m[i], params) == m[(i + 1) % len(m)] for i in range(len(m)))
        except DomainViolation:
            return False


@dataclass(frozen=True)
class ReachedCycle:
    cycle: Cycle
    steps: int

    kind = "reached_cycle"

    def to_json(self):
        return {"kind": self.kind, "cycle_id": self.cycle.id,
                "cycle": list(self.cycle.members), "steps": self.steps}


@dataclass(frozen=True)
class BudgetExceeded:
    steps: int

    kind = "budget_exceeded"

    def to_json(self):
        return {"kind": self.kind, "steps": self.steps}


@dataclass(frozen=True)
class MagnitudeExceeded:
    value: int
    steps: int

    kind = "magnitude_exceeded"

    def to_json(self):
        return {"kind": self.kind, "value": self.value, "steps": self.steps}


@dataclass(frozen=True)
class DomainViolationStatus:
    step_index: int
    value: int | None = None

    kind = "domain_violation"

    def to_json(self):
        return {"kind": self.kind, "step_index": self.step_index, "value": self.value}


@dataclass
class OrbitResult:
    seed: int
    path: list
    status: object

    @property
    def resolved(self):
        return isinstance(self.status, ReachedCycle)

    def to_json(self):
        return {"seed": self.seed, "path": list(self.path), "status": self.status.to_json()}


def orbit(seed, params, budget=None):
    """Iterate the map from ``seed`` until a repeat or a budget limit.

    The status is one of ReachedCycle, BudgetExceeded, MagnitudeExceeded
    or DomainViolationStatus; nothing is raised for a seed in the domain.
    """
    budget = budget or Budget()
    if not in_domain(seed, params.domain):
        raise DomainViolation(seed, 0)
    path = [seed]
    if abs(seed) > budget.max_magnitude:
        return OrbitResult(seed, path, MagnitudeExceeded(seed, 0))
    index = {seed: 0}
    cur = seed
    steps = 0
    while True:
        if steps >= budget.max_steps:
            return OrbitResult(seed, path, BudgetExceeded(steps))
        try:
            nxt = step(cur, params)
        except DomainViolation as exc:
            return OrbitResult(seed, path, DomainViolationStatus(steps, exc.value))
        steps += 1
        hit = index.get(nxt)
        if hit is not None:
            cyc = Cycle.from_members(path[hit:])
            return OrbitResult(seed, path, ReachedCycle(cyc, steps))
        if abs(nxt) > budget.max_magnitude:
            return OrbitResult(seed, path, MagnitudeExceeded(nxt, steps))
        index[nxt] = len(path)
        path.append(nxt)
        cur = nxt


class UnionFind:
    """Dictionary-backed union-find with path compression and union by size."""

    def __init__(self):
        self.parent = {}
        self.size = {}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        parent = self.parent
        if x not in parent:
            self.add(x)
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb] or (self.size[ra] == self.size[rb] and rb < ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size.pop(rb)
        return ra

    def attach_chain(self, values):
        """Union consecutive values; fresh ones are linked straight to the root."""
        parent, size = self.parent, self.size
        root = self.find(values[0])
        for v in values[1:]:
            if v in parent:
                root = self.union(root, v)
            else:
                parent[v] = root
                size[root] += 1

    def same(self, a, b):
        return self.find(a) == self.find(b)

    def __contains__(self, x):
        return x in self.parent

    def __len__(self):
        return len(self.parent)

    def merge(self, other):
        for x, parent in other.parent.items():
            self.union(x, parent)


@dataclass
class ClassPartition:
    """Census outcome: per-seed resolutions, cycle registry and classes.

    ``resolution`` maps each seed to a cycle id (str) or to an unresolved
    status object.  ``resolved_values`` holds every visited value whose
    orbit is known to close into a registered cycle.
    """

    params: SequenceParams
    seeds: tuple
    budget: Budget
    resolution: dict = field(default_factory=dict)
    cycles: dict = field(default_factory=dict)
    uf: UnionFind = field(default_factory=UnionFind)
    resolved_values: dict = field(default_factory=dict)

    @property
    def unresolved(self):
        return sorted(s for s, r in self.resolution.items() if not isinstance(r, str))

    def cycle_of(self, value):
        r = self.resolution.get(value)
        if isinstance(r, str):
            return r
        return self.resolved_values.get(value)

    def same_class(self, a, b):
        return self.uf.same(a, b)

    def summary(self):
        """Canonical, sharding-independent summary of the census."""
        cycles = sorted(self.cycles.values(), key=lambda c: (c.members[0], c.id))
        unresolved = self.unresolved
        n, _ = class_lower_bound(self)
        return {
            "params": {"p": self.params.p, "q": self.params.q, "domain": self.params.domain},
            "seeds": list(self.seeds),
            "budget": {"max_steps": self.budget.max_steps,
                       "max_magnitude": self.budget.max_magnitude},
            "cycles": len(cycles),
            "lower_bound": n,
            "unresolved": len(unresolved),
            "cycle_list": [{"id": c.id, "members": list(c.members)} for c in cycles],
            "unresolved_seeds": [
                {"seed": s, **self.resolution[s].to_json()} for s in unresolved
            ],
        }

    def per_seed_rows(self):
        for s in sorted(self.resolution):
            r = self.resolution[s]
            if isinstance(r, str):
                yield {"seed": s, "status": "resolved", "cycle_id": r,
                       "cycle_min": self.cycles[r].members[0]}
            else:
                yield {"seed": s, "status": r.kind, "cycle_id": "", "cycle_min": ""}


def _seed_values(lo, hi, domain):
    return [s for s in range(lo, hi + 1) if in_domain(s, domain)]


def _census_shard(params, seeds, budget):
    # Memo entries: value -> ("c", cycle_id, dist_to_cycle, cycle_len)
    # or ("m", steps_to_exceed, exceeded_value) for magnitude escapes.
    memo = {}
    cycles = {}
    resolution = {}
    uf = UnionFind()
    max_steps = budget.max_steps
    max_mag = budget.max_magnitude
    p, q = params.p, params.q
    aq = abs(q)
    domain_pos = params.domain == POSITIVE

    for seed in seeds:
        if seed in memo:
            entry = memo[seed]
            uf.add(seed)
            if entry[0] == "c":
                _, cid, dist, length = entry
                resolution[seed] = cid if dist + length <= max_steps else BudgetExceeded(max_steps)
            else:
                _, k, v = entry
                resolution[seed] = MagnitudeExceeded(v, k) if k <= max_steps else BudgetExceeded(max_steps)
            continue
        path = [seed]
        index = {seed: 0}
        uf.add(seed)
        if abs(seed) > max_mag:
            resolution[seed] = MagnitudeExceeded(seed, 0)
            continue
        cur = seed
        steps = 0
        outcome = None
        while True:
            if steps >= max_steps:
                outcome = BudgetExceeded(steps)
                break
            if cur % aq == 0:
                nxt = cur // q
            else:
                nxt = p * cur + 1
            if nxt == 0 or (domain_pos and nxt < 0):
                outcome = DomainViolationStatus(steps, nxt)
                break
            steps += 1
            hit = index.get(nxt)
            if hit is not None:
                cyc = Cycle.from_members(path[hit:])
                cycles.setdefault(cyc.id, cyc)
                length = len(path) - hit
                for i, v in enumerate(path):
                    memo[v] = ("c", cyc.id, max(hit - i, 0), length)
                outcome = cyc.id
                break
            entry = memo.get(nxt)
            if entry is not None:
                j = steps  # nxt sits at index j of this walk
                if entry[0] == "c":
                    _, cid, dist, length = entry
                    n = len(path)
                    for i, v in enumerate(path):
                        memo[v] = ("c", cid, dist + n - i, length)
                    outcome = cid if j + dist + length <= max_steps else BudgetExceeded(max_steps)
                else:
                    _, k, v_exc = entry
                    n = len(path)
                    for i, v in enumerate(path):
                        memo[v] = ("m", k + n - i, v_exc)
                    outcome = MagnitudeExceeded(v_exc, j + k) if j + k <= max_steps else BudgetExceeded(max_steps)
                uf.union(seed, nxt)
                break
            if abs(nxt) > max_mag:
                n = len(path)
                for i, v in enumerate(path):
                    memo[v] = ("m", n - i, nxt)
                outcome = MagnitudeExceeded(nxt, steps)
                break
            index[nxt] = len(path)
            path.append(nxt)
            cur = nxt
        uf.attach_chain(path)
        resolution[seed] = outcome

    resolved_values = {v: e[1] for v, e in memo.items() if e[0] == "c"}
    return resolution, cycles, uf, resolved_values


def _shards(seeds, jobs):
    jobs = max(1, min(jobs, len(seeds) or 1))
    size, extra = divmod(len(seeds), jobs)
    out, start = [], 0
    for k in range(jobs):
        end = start + size + (1 if k < extra else 0)
        out.append(seeds[start:end])
        start = end
    return [s for s in out if s]


def census(params, seeds, budget=None, jobs=1):
    """Resolve every seed in the inclusive range ``seeds = (lo, hi)``.

    Trajectories that run into an already-classified value inherit its
    class.  A seed counts as resolved only if a standalone :func:`orbit`
    with the same budget would reach its cycle, so results do not depend
    on the order seeds are processed or on ``jobs``.
    """
    budget = budget or Budget()
    lo, hi = seeds
    if lo > hi:
        raise InvalidParams(f"empty seed range {lo}..{hi}")
    values = _seed_values(lo, hi, params.domain)
    if len(values) != hi - lo + 1 and params.domain == POSITIVE:
        raise InvalidParams("seed range must lie in the positive integers")
    part = ClassPartition(params, (lo, hi), budget)
    shards = _shards(values, jobs)
    if jobs > 1 and len(shards) > 1:
        with ProcessPoolExecutor(max_workers=len(shards)) as ex:
            results = list(ex.map(_census_shard, [params] * len(shards), shards,
                                  [budget] * len(shards)))
    else:
        results = [_census_shard(params, s, budget) for s in shards]
    for resolution, cycles, uf, resolved_values in results:
        part.resolution.update(resolution)
        for cid, cyc in cycles.items():
            part.cycles.setdefault(cid, cyc)
        part.uf.merge(uf)
        part.resolved_values.update(resolved_values)
    # only cycles reached by some resolved seed count as witnesses
    reached = {r for r in part.resolution.values() if isinstance(r, str)}
    part.cycles = {cid: c for cid, c in part.cycles.items() if cid in reached}
    return part


def class_lower_bound(partition):
    """Number of distinct certified cycles, with the cycles as witnesses."""
    if partition is None:
        return 0, []
    witnesses = sorted(partition.cycles.values(), key=lambda c: (c.members[0], c.id))
    return len(witnesses), witnesses
