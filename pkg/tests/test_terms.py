import random
from itertools import product

import pytest

from groupeq import builtin
from groupeq import structure as st
from groupeq import terms as tm
from groupeq.errors import ParseError, UnboundVariable
from groupeq.terms import (IDENTITY, Comm, Const, Inv, Mul, Var, W)

from helpers import group, random_term, solvable_non_nilpotent


# --- evaluation ----------------------------------------------------------------

def test_eval_commutator_of_equal_args_is_identity():
    d6 = group("dihedral(6)")
    t = Comm(Var(0), Var(0))
    for x in d6.elements():
        assert tm.evaluate(t, d6, {0: x}) == 0


def test_eval_w_cases_over_d6():
    d6 = group("dihedral(6)")
    rotations = {0, 1, 2}
    reflections = {3, 4, 5}
    w = W(Var(0), Var(1), Var(2), Var(3))
    n = 1
    for ys in product(reflections, repeat=3):
        assign = {0: n, 1: ys[0], 2: ys[1], 3: ys[2]}
        assert tm.evaluate(w, d6, assign) == 0
    # one centralizing argument makes the commutator chain vanish: value x^8
    assert tm.evaluate(w, d6, {0: n, 1: 3, 2: 2, 3: 5}) == d6.power(n, 8)
    assert d6.power(n, 8) == d6.power(n, 2)


def test_eval_unbound_variable():
    with pytest.raises(UnboundVariable):
        tm.evaluate(Mul(Var(0), Var(5)), group("cyclic(3)"), {0: 1})


def test_eval_iterative_on_deep_chain():
    # 3000-deep multiplication chain must not hit the recursion limit
    c3 = group("cyclic(3)")
    t = Var(0)
    for _ in range(3000):
        t = Mul(t, Const(1))
    assert tm.evaluate(t, c3, {0: 0}) == 3000 % 3


# --- length ---------------------------------------------------------------------

def test_length_basics():
    assert tm.term_length(Var(0)) == 1
    assert tm.term_length(Comm(Var(0), Var(1))) == 3
    assert tm.term_length(Mul(Var(0), Inv(Var(1)))) == 4


def test_chain_length_grows_linearly():
    from groupeq.reductions import commutator_chain
    lengths = [tm.term_length(commutator_chain(k)) for k in range(1, 21)]
    increments = {b - a for a, b in zip(lengths, lengths[1:])}
    assert increments == {2}


def test_expanded_chain_length_exponential():
    from groupeq.reductions import commutator_chain
    for k in range(1, 11):
        assert tm.term_length(tm.expand(commutator_chain(k))) >= 2 ** k
    assert tm.term_length(tm.expand(commutator_chain(3))) >= 8


def test_substitution_length_bound():
    rng = random.Random(5)
    for _ in range(200):
        t = random_term(rng, 6, n_vars=3, depth=5)
        s = random_term(rng, 6, n_vars=3, depth=4)
        combined = tm.substitute(t, 0, s)
        assert tm.term_length(combined) <= tm.term_length(t) * max(
            tm.term_length(s), 2)


# --- expand / eliminate_inversion -----------------------------------------------

def test_expand_group_only_term_unchanged():
    t = Mul(Var(0), Inv(Const(2)))
    assert tm.expand(t) == t


def test_expand_comm_matches_exhaustively_s3():
    s3 = group("symmetric(3)")
    t = Comm(Var(0), Var(1))
    e = tm.expand(t)
    assert tm.signature_of(e) == tm.SIG_GROUP
    for a in s3.elements():
        for b in s3.elements():
            assign = {0: a, 1: b}
            assert tm.evaluate(t, s3, assign) == tm.evaluate(e, s3, assign)


def test_eliminate_inversion_simple():
    s3 = group("symmetric(3)")
    t = Inv(Var(0))
    e = tm.eliminate_inversion(t, s3)
    assert "^-1" not in tm.format_term(e)
    for a in s3.elements():
        assert tm.evaluate(e, s3, {0: a}) == s3.inv(a)


def test_eliminate_inversion_product():
    d6 = group("dihedral(6)")
    t = Inv(Mul(Var(0), Var(1)))
    e = tm.eliminate_inversion(t, d6)
    assert "^-1" not in tm.format_term(e)
    for a in d6.elements():
        for b in d6.elements():
            assign = {0: a, 1: b}
            assert tm.evaluate(e, d6, assign) == tm.evaluate(t, d6, assign)


def test_eliminate_inversion_no_inv_unchanged():
    t = Mul(Var(0), Comm(Var(1), Const(3)))
    assert tm.eliminate_inversion(t, group("dihedral(6)")) == t


@pytest.mark.parametrize("spec", ["cyclic(4)", "dihedral(6)", "quaternion",
                                  "product(cyclic(2),cyclic(2))"])
def test_transforms_preserve_evaluation_random(spec):
    g = group(spec)
    rng = random.Random(hash(spec) & 0xffff)
    for _ in range(40):
        t = random_term(rng, g.order, n_vars=3, depth=5)
        e = tm.expand(t)
        ei = tm.eliminate_inversion(t, g)
        assert tm.signature_of(e) == tm.SIG_GROUP
        assert "^-1" not in tm.format_term(ei)
        for _ in range(20):
            assign = {v: rng.randrange(g.order) for v in range(3)}
            want = tm.evaluate(t, g, assign)
            assert tm.evaluate(e, g, assign) == want
            assert tm.evaluate(ei, g, assign) == want


def test_w_case_analysis_on_index2_targets():
    """Over every index-2 (H, N): W(x, ys) = e when all ys avoid the
    centralizer, = x^8 when some y centralizes; x -> x^8 bijective on N."""
    checked = 0
    for spec in solvable_non_nilpotent(48):
        g = group(spec)
        target = st.equation_target(g)
        if target.index_over_2:
            continue
        H = target.group
        N = target.minimal_normal
        cent = st.centralizer(H, N.members)
        outside = [b for b in H.elements() if b not in cent.members]
        inside = sorted(cent.members)
        w = W(Var(0), Var(1), Var(2), Var(3))
        for x in N.members:
            # all three ys outside the centralizer: constant e on N
            assign = {0: x, 1: outside[0], 2: outside[-1], 3: outside[0]}
            assert tm.evaluate(w, H, assign) == 0
            assign = {0: x, 1: outside[0], 2: inside[0], 3: outside[-1]}
            assert tm.evaluate(w, H, assign) == H.power(x, 8)
        images = {H.power(x, 8) for x in N.members}
        assert images == set(N.members)
        checked += 1
    assert checked >= 5


# --- substitution ----------------------------------------------------------------

def test_substitute_basic():
    t = Comm(Var(0), Var(1))
    out = tm.substitute(t, 0, Const(4))
    assert out == Comm(Const(4), Var(1))


def test_substitute_all_occurrences():
    t = Mul(Var(0), Mul(Var(0), Var(1)))
    out = tm.substitute(t, 0, IDENTITY)
    assert out == Mul(IDENTITY, Mul(IDENTITY, Var(1)))


# --- parse / print ----------------------------------------------------------------

def test_parse_examples():
    assert tm.parse_term("[x0,x1]") == Comm(Var(0), Var(1))
    assert tm.parse_term("x0*x1*x2") == Mul(Mul(Var(0), Var(1)), Var(2))
    assert tm.parse_term("g2^-1") == Inv(Const(2))
    assert tm.parse_term("w(x0,x1,x2,x3)") == W(Var(0), Var(1), Var(2), Var(3))
    assert tm.parse_term("1") == IDENTITY
    assert tm.parse_term(" ( x0 * x1 ) ^-1 ") == Inv(Mul(Var(0), Var(1)))


def test_parse_errors_carry_position():
    for text in ("", "x", "[x0,x1", "w(x0,x1,x2)", "x0*", "x0)", "^-1", "q3",
                 "x0^-2"):
        with pytest.raises(ParseError):
            tm.parse_term(text)
    try:
        tm.parse_term("[x0;x1]")
    except ParseError as exc:
        assert exc.position is not None
        assert exc.expected


def test_print_parse_roundtrip_random():
    rng = random.Random(1234)
    for _ in range(1000):
        t = random_term(rng, 12, n_vars=4, depth=12)
        text = tm.format_term(t)
        again = tm.parse_term(text)
        assert again == t
        assert tm.format_term(again) == text


def test_variables_and_signature():
    t = Mul(Var(3), Comm(Var(0), Const(1)))
    assert tm.variables(t) == (0, 3)
    assert tm.signature_of(t) == tm.SIG_COMMUTATOR
    assert tm.signature_of(Var(0)) == tm.SIG_GROUP
    assert tm.signature_of(W(Var(0), Var(1), Var(2), Var(3))) == tm.SIG_W
