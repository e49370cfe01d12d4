import itertools
import unittest
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.errors import InvalidInputError, PreconditionError, ResourceLimitError
from src.services.abgroup import FinAbGroup, Homomorphism, abelian_groups_up_to, subgroup_from_generators
from src.services.hnp import (DecompFamily, LimitTag, classify_limit, construct_killing_pairing, enumerate_family_C,
                              hnp_holds, hnp_oracle_bruteforce, local_map_injective, smallest_prime_divisor,
                              verify_claim_twogen, zero_one_verdict)

V4 = FinAbGroup((2, 2))
A44 = FinAbGroup((4, 4))


GROUPS_UP_TO_64 = list(abelian_groups_up_to(64))


def all_subgroups(A):
    """Every subgroup of A, from all generating tuples of length max(rank, 1)."""
    return sorted({subgroup_from_generators(A, gens) for gens in itertools.combinations_with_replacement(
        list(A.elements()), max(A.rank, 1))})


def family(A, *generator_lists):
    return DecompFamily(A, tuple(subgroup_from_generators(A, gens) for gens in generator_lists))


@st.composite
def families(draw, max_order=64, max_rank=3):
    A = draw(st.sampled_from([A for A in GROUPS_UP_TO_64 if A.order <= max_order and A.rank <= max_rank]))
    elements = list(A.elements())
    groups = []
    for _ in range(draw(st.integers(0, 4))):
        gens = draw(st.lists(st.sampled_from(elements), min_size=1, max_size=min(max(A.rank, 1), 3)))
        groups.append(subgroup_from_generators(A, gens))
    return A, DecompFamily(A, tuple(groups))


class TestHnpHolds(unittest.TestCase):

    def test_cyclic_group_always_holds(self):
        A = FinAbGroup((12,))
        self.assertTrue(hnp_holds(A, DecompFamily(A)))
        self.assertTrue(hnp_holds(A, family(A, [(2,)], [(3,)])))

    def test_three_lines_fail(self):
        self.assertFalse(hnp_holds(V4, family(V4, [(1, 0)], [(0, 1)], [(1, 1)])))

    def test_full_group_holds(self):
        self.assertTrue(hnp_holds(V4, family(V4, [(1, 0)], [(1, 0), (0, 1)])))

    def test_foreign_family_is_rejected(self):
        with self.assertRaises(InvalidInputError):
            hnp_holds(A44, DecompFamily(V4))
        with self.assertRaises(InvalidInputError):
            DecompFamily(V4, (A44.full(),))

    def test_oracle_exhaustive_on_klein_group(self):
        subgroups = all_subgroups(V4)
        self.assertEqual(len(subgroups), 5)
        for mask in range(1 << len(subgroups)):
            D = DecompFamily(V4, tuple(H for i, H in enumerate(subgroups) if mask >> i & 1))
            self.assertEqual(hnp_holds(V4, D), hnp_oracle_bruteforce(V4, D))

    def test_oracle_examples(self):
        self.assertTrue(hnp_oracle_bruteforce(FinAbGroup((9,)), DecompFamily(FinAbGroup((9,)))))
        self.assertFalse(hnp_oracle_bruteforce(V4, DecompFamily(V4, (V4.trivial(),))))

    def test_oracle_bound(self):
        A = FinAbGroup((2, 2, 2, 2, 2, 2, 2, 2, 2))
        with self.assertRaises(ResourceLimitError):
            hnp_oracle_bruteforce(A, DecompFamily(A))
        with self.assertRaises(ResourceLimitError):
            hnp_oracle_bruteforce(V4, DecompFamily(V4), bound=3)

    def test_oracle_on_every_pair_of_subgroups(self):
        for A in abelian_groups_up_to(16):
            subgroups = all_subgroups(A)
            for size in (0, 1, 2):
                for groups in itertools.combinations(subgroups, size):
                    D = DecompFamily(A, groups)
                    self.assertEqual(hnp_holds(A, D), hnp_oracle_bruteforce(A, D), (str(A), groups))

    @settings(max_examples=500, deadline=None)
    @given(families(max_rank=5))
    def test_oracle_agreement(self, data):
        A, D = data
        self.assertEqual(hnp_holds(A, D), hnp_oracle_bruteforce(A, D))

    @settings(max_examples=60, deadline=None)
    @given(families(), st.data())
    def test_monotone_and_cyclic_irrelevant(self, data, extra):
        A, D = data
        gens = extra.draw(st.lists(st.sampled_from(list(A.elements())), max_size=2))
        H = subgroup_from_generators(A, gens)
        if hnp_holds(A, D):
            self.assertTrue(hnp_holds(A, D.with_group(H)))
        line = subgroup_from_generators(A, gens[:1])
        self.assertEqual(hnp_holds(A, D.with_group(line)), hnp_holds(A, D))

    @settings(max_examples=40, deadline=None)
    @given(families(max_order=32), st.data())
    def test_automorphism_equivariance(self, data, extra):
        A, D = data
        elements = list(A.elements())
        images = tuple(extra.draw(st.sampled_from([x for x in elements if not any(A.scale(d, x))]))
                       for d in A.invariant_factors)
        sigma = Homomorphism(A, A, images)
        if not sigma.is_automorphism():
            return
        moved = DecompFamily(A, tuple(sigma.image(H) for H in D.groups))
        self.assertEqual(hnp_holds(A, D), hnp_holds(A, moved))


class TestFamilyC(unittest.TestCase):

    def test_klein_group_has_all_subgroups(self):
        self.assertEqual(set(enumerate_family_C(V4, 2).members), set(all_subgroups(V4)))

    def test_excludes_full_group(self):
        members = enumerate_family_C(A44, 2).members
        self.assertNotIn(A44.full(), members)
        self.assertTrue(all(H.order <= 8 for H in members))

    def test_cyclic_prime(self):
        A = FinAbGroup((3,))
        self.assertEqual(set(enumerate_family_C(A, 3).members), {A.trivial(), A.full()})

    def test_members_sorted_and_unique(self):
        members = enumerate_family_C(FinAbGroup((2, 4)), 2).members
        self.assertEqual(list(members), sorted(set(members), key=lambda H: H.hnf))

    def test_ell_is_checked(self):
        with self.assertRaises(InvalidInputError):
            enumerate_family_C(A44, 3)
        with self.assertRaises(InvalidInputError):
            enumerate_family_C(FinAbGroup((6,)), 3)

    def test_exact_order_reading_never_changes_injectivity(self):
        for A in abelian_groups_up_to(48):
            ell = smallest_prime_divisor(A)
            self.assertEqual(local_map_injective(A, DecompFamily(A), ell),
                             local_map_injective(A, DecompFamily(A), ell, exact_order=True), str(A))


class TestLimit(unittest.TestCase):

    def test_local_map_examples(self):
        self.assertTrue(local_map_injective(FinAbGroup((2, 4)), DecompFamily(FinAbGroup((2, 4))), 2))
        self.assertFalse(local_map_injective(A44, DecompFamily(A44), 2))
        self.assertTrue(local_map_injective(A44, DecompFamily(A44, (A44.full(),)), 2))

    def test_zero_one_examples(self):
        self.assertEqual(zero_one_verdict(V4, 2, DecompFamily(V4, (V4.trivial(),))), 1)
        self.assertEqual(zero_one_verdict(A44, 2, DecompFamily(A44, (A44.trivial(),))), 0)
        self.assertEqual(zero_one_verdict(A44, 2, DecompFamily(A44, (A44.full(),))), 1)

    def test_classify_examples(self):
        self.assertIs(classify_limit(FinAbGroup((2, 4))).tag, LimitTag.ONE)
        verdict = classify_limit(A44)
        self.assertIs(verdict.tag, LimitTag.OPEN_INTERVAL)
        self.assertEqual((verdict.ell, verdict.quotient), (2, V4))
        verdict = classify_limit(FinAbGroup((3, 6)))
        self.assertIs(verdict.tag, LimitTag.OPEN_INTERVAL)
        self.assertEqual(verdict.quotient, FinAbGroup((3, 3)))
        with self.assertRaises(InvalidInputError):
            classify_limit(FinAbGroup())

    def test_twogen_examples(self):
        self.assertTrue(verify_claim_twogen(V4))
        self.assertTrue(verify_claim_twogen(FinAbGroup((2, 8))))
        self.assertTrue(verify_claim_twogen(FinAbGroup((3, 9))))
        with self.assertRaises(PreconditionError):
            verify_claim_twogen(A44)

    def test_killing_pairing_examples(self):
        f = construct_killing_pairing(A44)
        self.assertEqual(f((1, 0), (0, 1)), Fraction(1, 2))
        g = construct_killing_pairing(FinAbGroup((3, 6)))
        self.assertFalse(g.is_zero())
        self.assertTrue(all((3 * v) % 1 == 0 for v in g.values))
        with self.assertRaises(PreconditionError):
            construct_killing_pairing(FinAbGroup((2, 4)))

    def test_claims_up_to_64(self):
        for A in abelian_groups_up_to(64):
            verdict = classify_limit(A)
            injective = local_map_injective(A, DecompFamily(A), verdict.ell)
            self.assertEqual(verdict.tag is LimitTag.ONE, injective, str(A))
            if verdict.tag is LimitTag.ONE:
                self.assertTrue(verify_claim_twogen(A), str(A))
            else:
                f = construct_killing_pairing(A)
                self.assertFalse(f.is_zero())
                self.assertTrue(all(f.vanishes_on(H) for H in enumerate_family_C(A, verdict.ell).members))


@pytest.mark.slow
def test_claims_up_to_200():
    for A in abelian_groups_up_to(200):
        verdict = classify_limit(A)
        assert (verdict.tag is LimitTag.ONE) == local_map_injective(A, DecompFamily(A), verdict.ell)
        if verdict.tag is LimitTag.ONE:
            assert verify_claim_twogen(A), str(A)
        else:
            f = construct_killing_pairing(A)
            assert not f.is_zero(), str(A)
            assert all(f.vanishes_on(H) for H in enumerate_family_C(A, verdict.ell).members), str(A)


@pytest.mark.slow
def test_oracle_on_every_family_of_small_groups():
    for A in abelian_groups_up_to(16):
        subgroups = all_subgroups(A)
        if len(subgroups) > 16:
            continue
        for mask in range(1 << len(subgroups)):
            D = DecompFamily(A, tuple(H for i, H in enumerate(subgroups) if mask >> i & 1))
            assert hnp_holds(A, D) == hnp_oracle_bruteforce(A, D), (str(A), mask)
