from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from prodfree.construct import ResidueSet, lift_to_residues, qnr_set
from prodfree.errors import DomainError, PreconditionError, ResourceError
from prodfree.verify import (Counterexample, is_kj_product_free, is_product_free_integers,
                             is_product_free_residues, max_product_free,
                             max_product_free_exhaustive, upper_density_bound_check)


def brute_free(elems, n):
    s = set(elems)
    return not any(a * b % n in s for a in s for b in s)


def brute_kj_free(elems, k, j, n=None):
    def prods(r):
        out = set()
        for t in product(elems, repeat=r):
            v = 1
            for x in t:
                v = v * x % n if n else v * x
            out.add(v)
        return out
    return not prods(k) & prods(j)


def test_residue_examples():
    assert is_product_free_residues(ResidueSet.from_elements(9, [2, 5, 6, 8])) is None
    cex = is_product_free_residues(ResidueSet.from_elements(5, [2, 4]))
    assert cex is not None and cex.replay(ResidueSet.from_elements(5, [2, 4]))
    assert is_product_free_residues(ResidueSet.from_elements(7, [])) is None


def test_one_is_never_allowed():
    cex = is_product_free_residues(ResidueSet.from_elements(10, [1]))
    assert cex.left == (1, 1) and cex.product == 1


def test_integer_examples():
    assert is_product_free_integers([2, 3, 5, 7]) is None
    cex = is_product_free_integers([2, 3, 6])
    assert cex.product == 6 and cex.replay([2, 3, 6])
    assert is_product_free_integers([2, 5, 4]).product == 4
    assert is_product_free_integers([]) is None


@given(st.integers(2, 30), st.data())
@settings(max_examples=200, deadline=None)
def test_residue_checker_matches_brute(n, data):
    elems = data.draw(st.lists(st.integers(0, n - 1), unique=True, max_size=n))
    S = ResidueSet.from_elements(n, elems)
    cex = is_product_free_residues(S)
    assert (cex is None) == brute_free(elems, n)
    if cex is not None:
        assert cex.replay(S)
        assert str(cex).endswith(f"(mod {n})")


@given(st.lists(st.integers(1, 200), unique=True, max_size=25))
@settings(max_examples=200, deadline=None)
def test_integer_checker_matches_brute(elems):
    s = set(elems)
    expected = not any(a * b in s for a in s for b in s)
    cex = is_product_free_integers(elems)
    assert (cex is None) == expected
    if cex is not None:
        assert cex.replay(elems)


def test_replay_rejects_stale_witness():
    cex = Counterexample("pair-product", (2, 2), (4,), 4, 5)
    assert cex.replay([2, 4])
    assert not cex.replay([2, 3])
    assert not Counterexample("pair-product", (2, 2), (4,), 3, 5).replay([2, 4])


def test_kj_examples():
    assert is_kj_product_free([2, 3], 3, 2) is None
    cex = is_kj_product_free([2, 3], 2, 2)
    assert cex is not None and cex.replay([2, 3])
    assert is_kj_product_free([2, 3, 5], 2, 2, semantics="multiset") is None
    cex = is_kj_product_free([2, 3, 4, 6], 2, 2, semantics="multiset")
    assert cex is not None and cex.replay([2, 3, 4, 6])
    assert is_kj_product_free([2, 4], 2, 1) is not None
    with pytest.raises(DomainError):
        is_kj_product_free([2], 1, 2)


@given(st.integers(2, 24), st.data())
@settings(max_examples=120, deadline=None)
def test_kj_residues_match_brute(n, data):
    elems = data.draw(st.lists(st.integers(0, n - 1), unique=True, max_size=8))
    k = data.draw(st.integers(2, 4))
    j = data.draw(st.integers(1, k - 1))
    S = ResidueSet.from_elements(n, elems)
    cex = is_kj_product_free(S, k, j)
    assert (cex is None) == brute_kj_free(sorted(set(elems)), k, j, n)
    if cex is not None:
        assert cex.replay(S)


def test_kj_plain_is_product_free_for_2_1():
    S = qnr_set(3, 3)
    assert is_kj_product_free(S, 2, 1) is None
    assert (is_kj_product_free(ResidueSet.from_elements(5, [2, 4]), 2, 1) is None) is False


def test_kj_budget():
    with pytest.raises(ResourceError):
        is_kj_product_free(list(range(2, 200)), 4, 1, budget=1000)


@pytest.mark.parametrize("n", range(1, 21))
def test_branch_and_bound_matches_exhaustive(n):
    fast = max_product_free(n)
    slow = max_product_free_exhaustive(n)
    assert fast.d_value == slow.d_value
    assert fast.best_set == slow.best_set
    assert is_product_free_residues(fast.best_set) is None


def test_search_examples(validate):
    r = max_product_free(9)
    assert r.d_value >= Fraction(4, 9)
    assert max_product_free(3).best_set.elements() == [2]
    assert max_product_free(1).d_value == 0
    validate(r.to_json(), "max_free_result.schema.json")
    with pytest.raises(ResourceError):
        max_product_free(41)
    with pytest.raises(ResourceError):
        max_product_free_exhaustive(21)
    with pytest.raises(DomainError):
        max_product_free(0)


def test_upper_bound_216():
    S = lift_to_residues([2, 3], 216)
    rep = upper_density_bound_check(S, 1000)
    assert rep.least == 2 and rep.bound == 750 and rep.passed
    assert rep.count == sum(1 for m in range(1, 1001) if m % 216 in set(S.elements()))
    big = upper_density_bound_check(S, 10**4)
    assert big.passed and big.density_limit == Fraction(3, 4)


def test_upper_bound_edge_cases():
    rep = upper_density_bound_check(lambda m: m >= 50 and m % 2, 30)
    assert rep.least is None and rep.passed
    rep = upper_density_bound_check(range(7, 100), 10)
    assert rep.least == 7 and rep.count == 4 and rep.passed
    with pytest.raises(PreconditionError):
        upper_density_bound_check([2, 3, 6], 10)
    with pytest.raises(DomainError):
        upper_density_bound_check([2], 0)


def test_counterexample_json(validate):
    cex = is_product_free_residues(ResidueSet.from_elements(5, [2, 4]))
    validate(cex.to_json(), "counterexample.schema.json")
