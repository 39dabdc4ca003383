import pytest
from hypothesis import given, settings, strategies as st

from divseq.dynamics import NONZERO, Budget, SequenceParams, census
from divseq.errors import MissingComponentOfOne
from divseq.lattice import membership
from divseq.numth import PrimeBasis
from divseq.presentation import (
    CERTIFIED,
    HYPOTHESIS,
    ORBIT_STEP,
    HarvestConfig,
    KernelCertificate,
    RelationProvenance,
    Unknown,
    build_overline,
    harvest,
    kernel_member,
    quotient_report,
)

EXAMPLE_MEMBERSHIPS = [(7, 2, 8), (7, 16, 8), (5, 2, 6), (5, 12, 6), (3, 2, 4), (3, 8, 4)]


@pytest.mark.parametrize("p,q,x", EXAMPLE_MEMBERSHIPS)
@pytest.mark.parametrize("seed_bound", [1, 10])
def test_worked_memberships(p, q, x, seed_bound):
    h = harvest(SequenceParams(p, q), HarvestConfig(seed_bound=seed_bound))
    cert = kernel_member(x, h)
    assert isinstance(cert, KernelCertificate)
    assert cert.replay()
    again = KernelCertificate.from_json(cert.to_json())
    assert again.replay() and again.element == x


def test_seven_sixteen_uses_the_step_from_one():
    h = harvest(SequenceParams(7, 16), HarvestConfig(seed_bound=1))
    cert = kernel_member(8, h)
    assert cert.terms == ((1, RelationProvenance(ORBIT_STEP, 1)),)


def test_tampered_certificate_fails():
    h = harvest(SequenceParams(3, 2), HarvestConfig(seed_bound=10))
    cert = kernel_member(5, h)
    assert cert.replay()
    k, pr = cert.terms[-1]
    bad = KernelCertificate(cert.p, cert.q, cert.domain, cert.element,
                            cert.terms[:-1] + ((k + 1, pr),))
    assert not bad.replay()
    wrong_elem = KernelCertificate(cert.p, cert.q, cert.domain, 7, cert.terms)
    assert not wrong_elem.replay()
    bogus = KernelCertificate(3, 2, "pos", 2, ((1, RelationProvenance(ORBIT_STEP, 4)),))
    assert not bogus.replay()


def test_unknown_outside_harvest():
    h = harvest(SequenceParams(3, 2), HarvestConfig(seed_bound=1))
    res = kernel_member(11, h)
    assert isinstance(res, Unknown) and not res
    assert res.to_json()["result"] == "unknown"


def test_identity_is_trivially_a_member():
    h = harvest(SequenceParams(3, 2), HarvestConfig(seed_bound=1))
    assert kernel_member(1, h).replay()


def test_truncated_quotients():
    h = harvest(SequenceParams(7, 16), HarvestConfig(seed_bound=1))
    assert [dict(r) for r in h.matrix.rows] == [{0: 4}, {0: 3}]
    rep = quotient_report(h)
    assert rep.quotient.trivial and rep.kernel_flags == {2: True}
    assert rep.to_json()["truncated"] is True
    h = harvest(SequenceParams(5, 12), HarvestConfig(seed_bound=1))
    assert quotient_report(h).quotient.trivial
    # a wider harvest discovers new primes, so T is no longer trivial
    h = harvest(SequenceParams(5, 12), HarvestConfig(seed_bound=10))
    rep = quotient_report(h)
    assert rep.quotient.free_rank == 1 and rep.kernel_flags[2] and rep.kernel_flags[3]


def test_fixed_prime_bound_excludes_rows():
    h = harvest(SequenceParams(3, 2), HarvestConfig(seed_bound=20, prime_bound=7))
    assert h.primes == (2, 3, 5, 7)
    assert h.excluded
    for pr, cof in h.excluded:
        assert cof > 1
    assert h.replay_rows()


def test_sign_relation_in_nonzero_domain():
    params = SequenceParams(3, 2, NONZERO)
    h = harvest(params, HarvestConfig(seed_bound=3))
    assert h.sign_row is not None and h.matrix.rows[h.sign_row] == {0: 2}
    cert = kernel_member(5, h)
    assert cert and cert.replay()
    assert cert.combination().sign == 0


def test_trajectory_depth_adds_rows():
    params = SequenceParams(3, 2)
    shallow = harvest(params, HarvestConfig(seed_bound=30))
    deep = harvest(params, HarvestConfig(seed_bound=30, trajectory_depth=50))
    assert len(deep) > len(shallow)
    assert kernel_member(31, deep).replay()


@settings(max_examples=25)
@given(st.integers(1, 40), st.integers(2, 200))
def test_one_step_relations_give_class_equalities(seed_bound, x):
    # if x's trajectory meets 1 within the harvest, x lies in the kernel
    params = SequenceParams(3, 2)
    h = harvest(params, HarvestConfig(seed_bound=seed_bound, trajectory_depth=200))
    res = kernel_member(x, h)
    if res:
        assert res.replay()
    # every harvested step row identifies c with its image in the lattice
    for pr, row in zip(h.provenance, h.matrix.rows):
        assert membership(row, h.hnf) is not None


@settings(max_examples=20)
@given(st.sampled_from([(3, 2), (5, 2), (7, 2), (3, 4), (5, 3)]), st.integers(1, 30),
       st.integers(1, 500))
def test_every_yes_replays(pq, n, x):
    h = harvest(SequenceParams(*pq), HarvestConfig(seed_bound=n))
    res = kernel_member(x, h)
    if res:
        assert res.replay()


def test_monotone_under_growth():
    # with a fixed basis, more rows can only shrink the quotient
    params = SequenceParams(3, 2)
    prev = None
    for n in (2, 5, 10, 20, 40):
        rep = quotient_report(harvest(params, HarvestConfig(seed_bound=n, prime_bound=13)))
        q = rep.quotient
        if prev is not None:
            assert q.free_rank <= prev.free_rank
            if prev.finite:
                assert prev.order % q.order == 0
        prev = q


def test_overline_nonzero():
    params = SequenceParams(3, 2, NONZERO)
    part = census(params, (-100, 100))
    oh = build_overline(params, part)
    certified = {r.value for r in oh.certified_rows}
    assert -1 in certified and -5 in certified and 1 not in certified
    assert not oh.conditional
    s = oh.summary()
    assert s["status"] == CERTIFIED


def test_overline_hypotheses_and_missing_one():
    params = SequenceParams(5, 2)
    part = census(params, (1, 40), Budget(2000, 10**18))
    assert part.unresolved
    oh = build_overline(params, part, allow_hypotheses=True)
    assert oh.hypothesis_rows and oh.conditional
    assert all(r.status == HYPOTHESIS for r in oh.hypothesis_rows)
    part = census(params, (7, 7), Budget(100, 10**6))
    with pytest.raises(MissingComponentOfOne):
        build_overline(params, part)


def test_shared_basis_must_match_domain():
    from divseq.errors import BasisMismatch
    with pytest.raises(BasisMismatch):
        harvest(SequenceParams(3, 2), HarvestConfig(), basis=PrimeBasis(includes_sign=True))
