import pytest
from hypothesis import given, settings, strategies as st

from divseq.dynamics import (
    NONZERO,
    Budget,
    BudgetExceeded,
    ClassPartition,
    Cycle,
    MagnitudeExceeded,
    ReachedCycle,
    SequenceParams,
    UnionFind,
    census,
    class_lower_bound,
    orbit,
    step,
)
from divseq.errors import DomainViolation, InvalidParams
from oracles import direct_census, direct_cycle

P32 = SequenceParams(3, 2)


def test_step():
    assert step(6, P32) == 3
    assert step(3, P32) == 10
    assert step(-6, SequenceParams(3, -2, NONZERO)) == 3


def test_params_guard():
    with pytest.raises(InvalidParams):
        SequenceParams(0, 2)
    with pytest.raises(InvalidParams):
        SequenceParams(3, 1)
    with pytest.raises(InvalidParams):
        SequenceParams(3, -2)
    SequenceParams(3, -2, NONZERO)
    SequenceParams(1, 1, allow_unusual=True)


def test_orbit_27():
    r = orbit(27, P32)
    assert isinstance(r.status, ReachedCycle)
    assert r.status.cycle.members == (1, 4, 2)
    assert max(r.path) == 9232
    assert r.status.steps == 112  # 111 steps to 1, then the repeat


def test_orbit_zero_rejected():
    with pytest.raises(DomainViolation):
        orbit(0, P32)


def test_budget_and_magnitude():
    r = orbit(27, P32, Budget(max_steps=10))
    assert isinstance(r.status, BudgetExceeded) and len(r.path) == 11
    r = orbit(27, P32, Budget(max_magnitude=100))
    assert isinstance(r.status, MagnitudeExceeded)
    assert all(abs(v) <= 100 for v in r.path)


def test_divergent_looking_orbit_is_unresolved():
    r = orbit(7, SequenceParams(5, 2), Budget(10**4, 10**18))
    assert not r.resolved


def test_cycle_canonical():
    c = Cycle.from_members([4, 2, 1])
    assert c.members == (1, 4, 2)
    assert c.id == Cycle.from_members([2, 1, 4]).id
    assert c.verify(P32)
    assert not Cycle.from_members([1, 2, 4]).verify(P32)


def test_union_find():
    uf = UnionFind()
    uf.attach_chain([1, 2, 3])
    uf.attach_chain([5, 6])
    assert uf.same(1, 3) and not uf.same(1, 5)
    uf.union(3, 6)
    assert uf.same(1, 5)


def test_census_small_matches_oracle():
    part = census(P32, (1, 2000))
    want = direct_census(3, 2, range(1, 2001))
    for s, cyc in want.items():
        cid = part.resolution[s]
        assert part.cycles[cid].members == cyc


def test_census_nonzero_matches_oracle():
    params = SequenceParams(3, 2, NONZERO)
    part = census(params, (-300, 300))
    want = direct_census(3, 2, [s for s in range(-300, 301) if s])
    got = {s: part.cycles[c].members for s, c in part.resolution.items()}
    assert got == want
    assert part.uf.same(-5, -7) and not part.same_class(-1, 1)


def test_census_5x_plus_1_unresolved_not_counted():
    part = census(SequenceParams(5, 2), (1, 200), Budget(10**4, 10**18))
    n, wit = class_lower_bound(part)
    mins = {c.members[0] for c in wit}
    assert {1, 13, 17} <= mins
    assert part.unresolved
    assert 7 in part.unresolved
    for s in part.unresolved:
        assert direct_cycle(s, 5, 2, max_steps=10**4, max_mag=10**18) is None
    assert part.summary()["unresolved"] == len(part.unresolved)


def test_resolution_is_budget_exact():
    # a seed resolves iff a standalone orbit with the same budget resolves
    budget = Budget(max_steps=40)
    part = census(P32, (1, 300), budget)
    for s in range(1, 301):
        assert (s not in part.unresolved) == orbit(s, P32, budget).resolved


def test_empty_partition_bound():
    assert class_lower_bound(None) == (0, [])
    part = ClassPartition(P32, (1, 0), Budget())
    assert class_lower_bound(part) == (0, [])


@settings(max_examples=15)
@given(st.integers(1, 3000), st.integers(0, 300), st.sampled_from([2, 3, 8]),
       st.sampled_from([(3, 2), (5, 2), (7, 3)]))
def test_census_sharding_is_invisible(lo, width, jobs, pq):
    params = SequenceParams(*pq)
    budget = Budget(500, 10**12)
    a = census(params, (lo, lo + width), budget, jobs=1).summary()
    b = census(params, (lo, lo + width), budget, jobs=jobs).summary()
    assert a == b
