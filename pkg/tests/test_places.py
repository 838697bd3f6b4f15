import itertools
import random

import pytest

from multinorm_sha.abelian import PGroup, Subgroup, subgroup_from_generators
from multinorm_sha.places import (
    Classification,
    LocalData,
    Place,
    delta,
    dominates,
    fail_set,
    generic_place_candidates,
    i_n,
    locally_cyclic,
    noncyclic_places,
    omega_contains,
    sigma_contains,
    sigma_contains_literal,
)
from multinorm_sha.oracle import classify

from conftest import NO_PLACES, abstract_config


def test_delta_examples():
    assert delta(2, 1, 2, 1, 2) == 2
    assert delta(2, 1, 2, 3, 2) == 1
    assert delta(2, 5, 3, 1, 1) == 1
    assert dominates(2, 5, 3, 1, 1)
    assert delta(3, 4, 2, 7, 2) == 1
    assert delta(2, 0, 3, 4, 3) == 2


def test_dominates():
    assert dominates(2, 3, 2, 1, 1)
    assert not dominates(2, 1, 1, 3, 2)
    assert dominates(2, 2, 2, 2, 2)


def four_field_config():
    # e_i = (2, 2, 1): fields (0,1), (1,1), (1,2) against K_0 = (1,0)
    return abstract_config(
        2, (2, 2), [(2, (1, 0)), (2, (0, 1)), (2, (1, 1)), (2, (1, 2))]
    )


def test_i_n_examples():
    cfg = four_field_config()
    assert cfg.eis == (2, 2, 1)
    # diagonal image of n: every index dominated
    assert i_n(cfg, (3, 3, 1), 3) == (1, 2, 3)
    assert i_n(cfg, (0, 0, 0), 1) == ()
    assert i_n(cfg, (0, 2, 1), 2) == (2,)


def test_sigma_trivial_cases():
    cfg = abstract_config(2, (2, 2), [(2, (1, 0)), (2, (0, 1)), (2, (1, 1))])
    full = Subgroup.full(cfg.group)
    triv = Subgroup.trivial(cfg.group)
    for i in (1, 2):
        assert sigma_contains(cfg, full, i, cfg.eps[0])
        for d in range(cfg.eps[0] + 1):
            assert sigma_contains(cfg, triv, i, d)
    with pytest.raises(ValueError):
        sigma_contains(cfg, full, 1, 3)


def test_sigma_derived_example():
    cfg = abstract_config(2, (2, 2), [(2, (1, 0)), (2, (0, 1)), (2, (1, 1))])
    # field with character (0,1) sits at some index i; D = <(1,0)> = its kernel
    i = cfg.permutation.index(1)
    d_sub = subgroup_from_generators(cfg.group, [(1, 0)])
    assert not sigma_contains(cfg, d_sub, i, 0)
    assert sigma_contains(cfg, d_sub, i, 2)


def test_sigma_matches_literal_definition():
    rng = random.Random(17)
    for spec, exps in [
        ([(2, (1, 0)), (2, (0, 1)), (2, (1, 2))], (2, 2)),
        ([(1, (0, 1)), (3, (1, 0)), (3, (1, 4))], (3, 1)),
        ([(2, (1, 0, 0)), (2, (0, 1, 0)), (1, (0, 0, 1)), (2, (1, 1, 2))], (2, 2, 1)),
    ]:
        cfg = abstract_config(2, exps, spec)
        for d_sub in generic_place_candidates(cfg):
            for i in range(1, cfg.m + 1):
                for d in range(cfg.eps[0] + 1):
                    assert sigma_contains(cfg, d_sub, i, d) == \
                        sigma_contains_literal(cfg, d_sub, i, d)
        for _ in range(10):
            gens = [
                tuple(rng.randrange(m) for m in cfg.group.moduli)
                for _ in range(2)
            ]
            d_sub = subgroup_from_generators(cfg.group, gens)
            for i in range(1, cfg.m + 1):
                for d in range(cfg.eps[0] + 1):
                    assert sigma_contains(cfg, d_sub, i, d) == \
                        sigma_contains_literal(cfg, d_sub, i, d)


def test_sigma_monotone_in_d():
    cfg = four_field_config()
    for d_sub in generic_place_candidates(cfg):
        for i in range(1, cfg.m + 1):
            values = [sigma_contains(cfg, d_sub, i, d) for d in range(cfg.eps[0] + 1)]
            assert values == sorted(values)  # False... then True...
            assert values[-1]


def test_omega_trivial_cases():
    cfg = four_field_config()
    full = Subgroup.full(cfg.group)
    # n dominating every entry: Omega(I) is everything
    assert omega_contains(cfg, full, (0, 0, 0), 0)
    assert omega_contains(cfg, full, (3, 3, 1), 3)


def test_omega_improvement_closure():
    # if omega holds at n, it holds at any n' dominating the same pattern
    cfg = four_field_config()
    p, e1 = cfg.p, cfg.e_i(1)
    vectors = list(itertools.product(*(range(p ** e) for e in cfg.eis)))
    rng = random.Random(1)
    for d_sub in generic_place_candidates(cfg):
        for a in rng.sample(vectors, 12):
            for n in range(p ** e1):
                if not omega_contains(cfg, d_sub, a, n):
                    continue
                inside = set(i_n(cfg, a, n))
                for n2 in range(p ** e1):
                    inside2 = set(i_n(cfg, a, n2))
                    if not inside <= inside2:
                        continue
                    if all(
                        delta(p, n2, e1, a[i - 1], cfg.e_i(i))
                        >= delta(p, n, e1, a[i - 1], cfg.e_i(i))
                        for i in range(1, cfg.m + 1)
                        if i not in inside2
                    ):
                        assert omega_contains(cfg, d_sub, a, n2)


def test_classify_diagonal_is_in_g():
    cfg = four_field_config()
    places = LocalData(
        (Place("w", subgroup_from_generators(cfg.group, [(1, 0), (0, 1)])),)
    )
    p = cfg.p
    for n in range(p ** cfg.e_i(1)):
        a = tuple(n % p ** e for e in cfg.eis)
        assert classify(cfg, places, a) is Classification.IN_G


def test_classify_paper_example(quartic_17_13):
    cfg, local = quartic_17_13
    # the order-4 generator of G_omega fails only at finitely many places
    gen = (1, 0)
    assert classify(cfg, local, gen) is Classification.IN_G_OMEGA_ONLY
    double = (2, 0)
    assert classify(cfg, local, double) is Classification.IN_G
    assert classify(cfg, NO_PLACES, gen) is Classification.IN_G


def test_fail_set_shapes(quartic_17_13):
    cfg, local = quartic_17_13
    bad = fail_set(cfg, local, (1, 0))
    assert bad  # fails somewhere exceptional
    assert all(kind == "place" for kind, _ in bad)
    assert fail_set(cfg, local, (1, 1)) == set()


def test_locally_cyclic_and_noncyclic_places(quartic_17_13, quartic_17_409):
    cfg, local = quartic_17_13
    # the full compositum is not locally cyclic at the places over 13
    everything = cfg.composite((0, 1, 2), 2)
    assert not locally_cyclic(cfg, local, everything)
    bad = noncyclic_places(cfg, local, everything)
    assert {pl.label for pl in bad} == {"13|3+2i", "13|3-2i"}
    # its quadratic part is locally cyclic
    half = cfg.composite((0, 1, 2), 1)
    assert locally_cyclic(cfg, local, half)
    assert noncyclic_places(cfg, local, half) == []
    # cyclic quotients never fail, with or without places
    assert locally_cyclic(cfg, local, cfg.kernel(0))
    assert locally_cyclic(cfg, NO_PLACES, everything)

    cfg2, local2 = quartic_17_409
    assert locally_cyclic(cfg2, local2, cfg2.composite((0, 1, 2), 2))


def test_place_label_uniqueness():
    group = PGroup(2, (1, 1))
    sub = Subgroup.trivial(group)
    with pytest.raises(ValueError):
        LocalData((Place("v", sub), Place("v", sub)))
