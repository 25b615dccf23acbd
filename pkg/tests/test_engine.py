import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumsetlab.corpus import corpus_group
from sumsetlab.engine import (Caps, SamplingPlan, _verify_capped, cd_bound,
                              find_extremal, product_set,
                              restricted_product_set, verify_exhaustive,
                              verify_sampled)
from sumsetlab.factor_system import build_factor_system, extension_from_factor_system
from sumsetlab.groups import SubsetMask, build_group
from sumsetlab.rng import SplitMix64
from sumsetlab.structure import INFINITY, generated_subgroup


def mask(width, *elements):
    return SubsetMask.from_elements(width, elements)


def naive_product(g, a, b, restricted=False):
    """Oracle: plain double loop into a python set."""
    return {
        g.mul(x, y)
        for x in a.elements()
        for y in b.elements()
        if not (restricted and x == y)
    }


def test_product_set_examples():
    q = build_group("quaternion")
    assert product_set(q, mask(8, 2), mask(8, 2)).elements() == (1,)
    z5 = build_group("cyclic:5")
    assert product_set(z5, mask(5, 0, 1), mask(5, 0, 2)).elements() == (0, 1, 2, 3)
    b = mask(5, 1, 3, 4)
    assert product_set(z5, mask(5, 0), b).bits == b.bits


def test_restricted_product_examples():
    z5 = build_group("cyclic:5")
    s = mask(5, 0, 1, 2)
    assert restricted_product_set(z5, s, s).elements() == (1, 2, 3)
    z7 = build_group("cyclic:7")
    assert restricted_product_set(z7, mask(7, 3), mask(7, 3)).elements() == ()
    assert restricted_product_set(z7, mask(7, 0), mask(7, 0, 1)).elements() == (1,)


def test_mask_width_validation():
    z5 = build_group("cyclic:5")
    with pytest.raises(ValueError):
        product_set(z5, mask(6, 0), mask(5, 0))


@settings(max_examples=80)
@given(
    spec=st.sampled_from(["cyclic:7", "quaternion", "heisenberg:3", "dihedral:5"]),
    data=st.data(),
)
def test_product_set_matches_naive_oracle(spec, data):
    g = corpus_group(spec) if spec != "dihedral:5" else build_group("dihedral:5")
    top = (1 << g.order) - 1
    a = SubsetMask(data.draw(st.integers(1, top)), g.order)
    b = SubsetMask(data.draw(st.integers(1, top)), g.order)
    assert set(product_set(g, a, b).elements()) == naive_product(g, a, b)
    assert set(restricted_product_set(g, a, b).elements()) == naive_product(
        g, a, b, restricted=True
    )


@settings(max_examples=80)
@given(data=st.data())
def test_product_size_bounds_and_identity_laws(data):
    g = corpus_group("heisenberg:3")
    top = (1 << 27) - 1
    a = SubsetMask(data.draw(st.integers(1, top)), 27)
    b = SubsetMask(data.draw(st.integers(1, top)), 27)
    prod = product_set(g, a, b)
    assert max(len(a), len(b)) <= len(prod) <= len(a) * len(b)
    ident = mask(27, g.identity)
    assert product_set(g, a, ident).bits == a.bits
    assert product_set(g, ident, b).bits == b.bits
    restricted = restricted_product_set(g, a, b)
    assert restricted.bits & ~prod.bits == 0
    if a.bits & b.bits == 0:
        assert restricted.bits == prod.bits


def test_cd_bound_examples():
    q = build_group("quaternion")
    check = cd_bound(q, mask(8, 2), mask(8, 2))
    assert (check.bound, check.product_size, check.holds) == (1, 1, True)
    # |A| = 3, |B| = 2 pairs: bound = min(2, 4) = 2, always met
    from itertools import combinations
    for a_elts in combinations(range(8), 3):
        for b_elts in combinations(range(8), 2):
            c = cd_bound(q, mask(8, *a_elts), mask(8, *b_elts))
            assert c.bound == 2 and c.holds
    z7 = build_group("cyclic:7")
    c = cd_bound(z7, mask(7, 0, 1, 2, 3), mask(7, 0, 1, 2, 3))
    assert c.product_size == 7 and c.bound == 7 and c.holds


def test_cd_bound_rejects_empty_sets_in_plain_mode():
    z5 = build_group("cyclic:5")
    with pytest.raises(ValueError):
        cd_bound(z5, SubsetMask.empty(5), mask(5, 0))
    # the restricted variant tolerates empty and singleton sets
    c = cd_bound(z5, mask(5, 2), mask(5, 2), theorem="eh")
    assert c.product_size == 0 and c.bound == -1 and c.holds


def test_exhaustive_z5_matches_brute_force_oracle():
    z5 = build_group("cyclic:5")
    report = verify_exhaustive(z5, "cd")
    pairs = violations = extremal = 0
    for am in range(1, 32):
        for bm in range(1, 32):
            a = SubsetMask(am, 5)
            b = SubsetMask(bm, 5)
            size = len(naive_product(z5, a, b))
            bound = min(5, len(a) + len(b) - 1)
            pairs += 1
            violations += size < bound
            extremal += size == bound
    assert report.pairs_checked == pairs == 961
    assert len(report.violations) == violations == 0
    assert report.extremal_count == extremal


def test_exhaustive_eh_z3_counts_nonempty_pairs():
    z3 = build_group("cyclic:3")
    report = verify_exhaustive(z3, "eh")
    assert report.pairs_checked == 49
    assert report.violations == ()


def test_exhaustive_eh_matches_brute_force_on_z5():
    z5 = build_group("cyclic:5")
    report = verify_exhaustive(z5, "eh")
    extremal = 0
    for am in range(1, 32):
        for bm in range(1, 32):
            a = SubsetMask(am, 5)
            b = SubsetMask(bm, 5)
            size = len(naive_product(z5, a, b, restricted=True))
            bound = min(5, len(a) + len(b) - 3)
            assert size >= bound
            extremal += size == bound
    assert report.extremal_count == extremal
    assert report.violations == ()


def test_exhaustive_respects_order_limit():
    c25 = build_group("cyclic:25")
    with pytest.raises(ValueError, match="exhaustive limit"):
        verify_exhaustive(c25, "cd")


def test_exhaustive_quaternion_and_dihedral_have_no_violations():
    for spec in ("quaternion", "dihedral:5"):
        report = verify_exhaustive(build_group(spec), "cd")
        assert report.violations == ()
        assert report.pairs_checked == (2 ** report.group_order - 1) ** 2


def test_capped_counts_match_combinatorics():
    h = build_group("heisenberg:3")
    report = verify_exhaustive(h, "cd", Caps(max_a_size=2, max_b_size=2))
    per_side = math.comb(27, 1) + math.comb(27, 2)
    assert report.pairs_checked == per_side ** 2
    assert report.violations == ()
    assert report.mode["kind"] == "size_capped"


def test_capped_sum_cap_counts():
    z7 = build_group("cyclic:7")
    report = verify_exhaustive(z7, "cd", Caps(max_a_size=3, max_b_size=3, sum_cap=4))
    want = sum(
        math.comb(7, sa) * math.comb(7, sb)
        for sa in range(1, 4)
        for sb in range(1, 4)
        if sa + sb <= 4
    )
    assert report.pairs_checked == want
    assert report.violations == ()


def test_capped_python_fallback_matches_fast_path():
    g = build_group("quaternion")
    caps = Caps(max_a_size=2, max_b_size=3, sum_cap=4)
    fast = _verify_capped(g, "cd", caps, workers=1)
    slow = _verify_capped(g, "cd", caps, workers=1, force_python=True)
    assert fast[0] == slow[0]
    assert fast[1] == slow[1]
    assert [v.to_json_dict() for v in fast[2]] == [v.to_json_dict() for v in slow[2]]
    fast_eh = _verify_capped(g, "eh", caps, workers=1)
    slow_eh = _verify_capped(g, "eh", caps, workers=1, force_python=True)
    assert (fast_eh[0], fast_eh[1]) == (slow_eh[0], slow_eh[1])


def test_capped_mode_works_above_64_elements():
    g = build_group("cyclic:65")
    report = verify_exhaustive(g, "cd", Caps(max_a_size=1, max_b_size=2))
    per_b = 65 + math.comb(65, 2)
    assert report.pairs_checked == 65 * per_b
    assert report.violations == ()
    # |A| = 1 translates B, so every pair meets the bound exactly
    assert report.extremal_count == report.pairs_checked


def test_sampled_reports_are_reproducible_and_worker_invariant():
    h = build_group("heisenberg:3")
    plan = SamplingPlan(seed=42, count=3000)
    first = verify_sampled(h, "cd", plan)
    second = verify_sampled(h, "cd", plan)
    third = verify_sampled(h, "cd", plan, workers=4)
    assert first.to_json_dict() == second.to_json_dict() == third.to_json_dict()
    assert first.pairs_checked == 3000
    assert first.violations == ()


def test_sampled_fixed_sizes_singletons(corpus_member):
    plan = SamplingPlan(seed=5, count=1, fixed_sizes=(1, 1))
    report = verify_sampled(corpus_member, "cd", plan)
    assert report.pairs_checked == 1
    assert report.violations == ()


def test_sampled_large_cyclic_group_cd():
    g = build_group("cyclic:169")
    report = verify_sampled(g, "cd", SamplingPlan(seed=42, count=100000))
    assert report.violations == ()
    assert report.pairs_checked == 100000


def test_sampled_frobenius_eh_finds_no_violations():
    g = build_group("frobenius:7:3:2")
    report = verify_sampled(g, "eh", SamplingPlan(seed=7, count=100000))
    assert report.violations == ()
    assert report.pairs_checked == 100000


def test_sampled_matches_per_pair_bound_checks():
    g = build_group("frobenius:7:3:2")
    plan = SamplingPlan(seed=11, count=50)
    report = verify_sampled(g, "cd", plan)
    rng = SplitMix64(11)
    extremal = 0
    for _ in range(50):
        a = SubsetMask(rng.nonempty_mask(21), 21)
        b = SubsetMask(rng.nonempty_mask(21), 21)
        check = cd_bound(g, a, b)
        assert check.holds
        extremal += check.product_size == check.bound
    assert report.extremal_count == extremal


def test_sampled_plan_validation():
    with pytest.raises(ValueError):
        SamplingPlan(seed=1, count=0)
    g = build_group("cyclic:5")
    with pytest.raises(ValueError):
        verify_sampled(g, "cd", SamplingPlan(seed=1, count=1, fixed_sizes=(6, 1)))
    with pytest.raises(ValueError):
        verify_sampled(g, "cd", None)


def test_exhaustive_workers_do_not_change_the_report():
    z7 = build_group("cyclic:7")
    one = verify_exhaustive(z7, "cd", workers=1)
    four = verify_exhaustive(z7, "cd", workers=4)
    assert one.to_json_dict() == four.to_json_dict()


def test_find_extremal_z7():
    z7 = build_group("cyclic:7")
    pairs = find_extremal(z7, 2, 3)
    as_tuples = {(a.elements(), b.elements()) for a, b in pairs}
    assert ((0, 1), (0, 1, 2)) in as_tuples
    # oracle: brute-force count over all 21 * 35 pairs
    count = 0
    from itertools import combinations
    for a_elts in combinations(range(7), 2):
        for b_elts in combinations(range(7), 3):
            prod = {(x + y) % 7 for x in a_elts for y in b_elts}
            count += len(prod) == 4
    assert len(pairs) == count == 147


def test_find_extremal_singletons_and_limit():
    z5 = build_group("cyclic:5")
    assert len(find_extremal(z5, 1, 1)) == 25
    assert len(find_extremal(z5, 1, 1, limit=7)) == 7
    pairs = find_extremal(z5, 3, 3)
    assert ((0, 1, 2), (0, 1, 2)) in {(a.elements(), b.elements()) for a, b in pairs}


def test_find_extremal_guards():
    z5 = build_group("cyclic:5")
    with pytest.raises(ValueError):
        find_extremal(z5, 0, 1)
    big = build_group("cyclic:30")
    with pytest.raises(ValueError, match="search space"):
        find_extremal(big, 15, 15)


def test_every_corpus_group_is_clean_in_every_mode(corpus_member):
    g = corpus_member
    if g.order <= 11:
        assert verify_exhaustive(g, "cd").violations == ()
    assert verify_exhaustive(g, "cd", Caps(max_a_size=2, max_b_size=2)).violations == ()
    plan = SamplingPlan(seed=8, count=200)
    assert verify_sampled(g, "cd", plan).violations == ()


def test_exhaustive_limit_is_configurable():
    g = build_group("cyclic:12")
    report = verify_exhaustive(g, "cd", exhaustive_limit=12)
    assert report.pairs_checked == (2 ** 12 - 1) ** 2
    assert report.violations == ()


def test_theorem_argument_is_validated():
    z5 = build_group("cyclic:5")
    with pytest.raises(ValueError):
        verify_exhaustive(z5, "nope")


def test_bound_check_json_masks_are_sorted_lists():
    z5 = build_group("cyclic:5")
    check = cd_bound(z5, mask(5, 3, 1), mask(5, 4, 0))
    payload = check.to_json_dict()
    assert payload["a"] == [1, 3]
    assert payload["b"] == [0, 4]
    assert payload["p_g"] == 5


def test_report_json_for_trivial_group_uses_null_torsion():
    g = build_group("cyclic:1")
    report = verify_exhaustive(g, "cd")
    payload = report.to_json_dict()
    assert payload["p_g"] is None
    assert payload["pairs_checked"] == 1
    assert report.p_g == INFINITY


def test_verification_is_invariant_under_the_pair_isomorphism():
    # same violation/extremal statistics for a group and its pair-group image
    for spec, gens in [("cyclic:6", (3,)), ("quaternion", (6,))]:
        g = build_group(spec)
        fs, pr = build_factor_system(g, generated_subgroup(g, gens))
        ext = extension_from_factor_system(fs)
        r1 = verify_exhaustive(g, "cd")
        r2 = verify_exhaustive(ext, "cd")
        assert r1.pairs_checked == r2.pairs_checked
        assert len(r1.violations) == len(r2.violations) == 0
        assert r1.extremal_count == r2.extremal_count


def test_multiset_of_sizes_is_invariant_under_the_pair_isomorphism():
    g = build_group("cyclic:6")
    fs, pr = build_factor_system(g, generated_subgroup(g, (3,)))
    ext = extension_from_factor_system(fs)

    def stats(group):
        out = {}
        for am in range(1, 64):
            for bm in range(1, 64):
                a = SubsetMask(am, 6)
                b = SubsetMask(bm, 6)
                key = (len(a), len(b), len(product_set(group, a, b)))
                out[key] = out.get(key, 0) + 1
        return out

    assert stats(g) == stats(ext)
