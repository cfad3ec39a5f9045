import itertools
import json

import pytest

from zsf.errors import CapacityError, DomainError, ValidationError
from zsf.group import cyclic, dihedral
from zsf.sequence import (
    ProductTable,
    Sequence,
    classify,
    load_sequence,
    product_set,
    sigma_variants,
    smoothness,
    subsequence_products,
)


def names(G, es):
    return {G.names[x] for x in es}


def brute_pi(seq):
    G = seq.group
    return {G.product(p) for p in set(itertools.permutations(seq.terms()))} if len(seq) else {G.identity}


def test_notation(D6):
    S = Sequence.parse(D6, "a^[4] t^[2]")
    assert len(S) == 6
    assert S.multiplicity(D6.element("a")) == 4
    assert names(D6, S.support) == {"a", "t"}
    assert S.max_multiplicity == 4
    assert Sequence.parse(D6, "a t").divides(S)
    assert not Sequence.parse(D6, "a^2").divides(S)


def test_text_round_trip(D6):
    for text in ["a^[4] t^[2]", "t (a t)", "(a^2)^[4] (a t)^[3]", "1", "a^2 t"]:
        S = Sequence.parse(D6, text)
        assert Sequence.parse(D6, str(S)) == S
    assert str(Sequence.empty(D6)) == "1_F"


def test_bare_power_means_element_when_named(D6):
    assert Sequence.parse(D6, "a^2").terms() == [D6.element("a^2")]
    # no element is called "t^2", so the exponent is a multiplicity
    assert Sequence.parse(D6, "a^4 t^2") == Sequence.parse(D6, "a a a a t t")


def test_json_round_trip(D6):
    S = Sequence.parse(D6, "a^[4] t^[2]")
    assert load_sequence(None, json.dumps(S.to_json())) == S
    assert load_sequence(D6, json.dumps({"group": {"kind": "dihedral", "n": 3}, "terms": ["a^[4]", "t", "t"]})) == S


def test_parse_errors(D6):
    with pytest.raises(ValidationError):
        Sequence.parse(D6, "b")


def test_product_set_examples(D6, C5):
    assert set(product_set(Sequence.empty(D6))) == {D6.identity}
    assert names(D6, product_set(Sequence.parse(D6, "t (a t)"))) == {"a", "a^2"}
    assert set(product_set(Sequence.parse(C5, "1 2 3"))) == {1}


def test_subsequence_product_examples(D6):
    S = Sequence.parse(D6, "t (a t)")
    assert names(D6, subsequence_products(S)) == {"t", "a t", "a", "a^2"}
    assert subsequence_products(S, 2) == product_set(S)
    C7 = cyclic(7)
    assert set(subsequence_products(Sequence.parse(C7, "2^[3]"))) == {2, 4, 6}
    with pytest.raises(DomainError):
        subsequence_products(S, 3)


def test_sigma_examples(C5, D6):
    assert set(sigma_variants(Sequence.parse(C5, "1 1 2"), 2)) == {2, 3}
    assert set(sigma_variants(Sequence.parse(C5, "0^[3]"))) == {0}
    assert set(sigma_variants(Sequence.parse(cyclic(4), "1 3"))) == {0, 1, 3}
    with pytest.raises(DomainError):
        sigma_variants(Sequence.parse(C5, "1"), 0)
    with pytest.raises(DomainError):
        sigma_variants(Sequence.parse(D6, "t"))


def test_classify_examples(D6, C5):
    assert classify(Sequence.parse(D6, "t^[2]"))["product_one"]
    assert classify(Sequence.parse(C5, "1^[4]"))["product_one_free"]
    empty = classify(Sequence.empty(D6))
    assert empty["product_one"] and empty["product_one_free"] and empty["squarefree"]
    assert not classify(Sequence.parse(D6, "t^[2]"))["squarefree"]


def test_smoothness_examples(C5):
    C7 = cyclic(7)
    cert = smoothness(Sequence.parse(C7, "1 1 2"), 1)
    assert (cert.g, cert.coefficients, cert.m) == (1, (1, 1, 2), 4)
    cert = smoothness(Sequence.parse(C5, "1^[4]"))
    assert (cert.g, cert.m) == (1, 4)
    assert smoothness(Sequence.parse(C5, "1 4")) is None
    with pytest.raises(DomainError):
        smoothness(Sequence.parse(dihedral(3), "t"))


def test_smoothness_tries_generators_in_order():
    C7 = cyclic(7)
    # 3 3 6 is 3-smooth (3 = 1*3, 6 = 2*3) and the least generator that works is 3
    assert smoothness(Sequence.parse(C7, "3 3 6")).g == 3


def test_transform_examples(D6):
    S = Sequence.parse(D6, "t (a t) a")
    N = D6.element_set([0, 1, 2])
    Q, phi = D6.quotient(N)
    image = S.transform(phi)
    assert Q.order == 2 and len(image) == 3
    assert image.counts[Q.identity] == 1
    assert S.transform(D6.quotient(D6.element_set([0]))[1]).counts == S.counts
    assert S.transform("inverse") == S.inverse()
    assert Sequence.parse(D6, "t a").inverse() == Sequence.parse(D6, "t a^2")


def test_budget_guard(D6):
    S = Sequence.parse(D6, "a^[30] t^[30]")
    with pytest.raises(CapacityError):
        ProductTable(S, budget=100)


def test_ordering_witness(D6):
    S = Sequence.parse(D6, "a^[4] t^[2]")
    t = ProductTable(S)
    order = t.ordering()
    assert sorted(order) == S.terms()
    assert D6.product(order) == D6.identity


@pytest.mark.parametrize("text", ["t (a t) a", "a^[2] t (a^2 t)", "a a^2 t t", "(a t)^[3] a"])
def test_pi_matches_brute_force(D6, text):
    S = Sequence.parse(D6, text)
    assert set(product_set(S)) == brute_pi(S)
