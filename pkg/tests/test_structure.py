import pytest

from groupeq import builtin
from groupeq import structure as st
from groupeq.errors import (InternalCheckFailed, IsNilpotent, NotNormal,
                            NotSolvable)

from helpers import corpus, group, solvable_non_nilpotent


def members(sub):
    return set(sub.sorted_members)


# --- closures and basic subgroup machinery -----------------------------------

def test_closure_empty_and_full():
    d6 = group("dihedral(6)")
    assert members(st.closure(d6, ())) == {0}
    assert st.closure(d6, range(6)).order == 6


def test_closure_rotation_d6():
    d6 = group("dihedral(6)")
    sub = st.closure(d6, {1})
    assert members(sub) == {0, 1, 2}
    assert sub.is_normal


def test_normal_closure_identity():
    a4 = group("alternating(4)")
    assert members(st.normal_closure(a4, 0)) == {0}


def test_normal_closure_double_transposition_a4():
    a4 = group("alternating(4)")
    double_transpositions = [g for g in a4.elements()
                             if g and a4.element_order(g) == 2]
    assert len(double_transpositions) == 3
    for g in double_transpositions:
        klein = st.normal_closure(a4, g)
        assert klein.order == 4
        assert members(klein) == {0, *double_transpositions}


def test_normal_closure_central_involution_sl23():
    sl = group("sl23")
    z = st.center(sl)
    assert z.order == 2
    involution = max(z.members)
    assert members(st.normal_closure(sl, involution)) == members(z)


def test_commutator_subgroup_values():
    assert st.commutator_subgroup(group("cyclic(9)"),
                                  group("cyclic(9)")).order == 1
    s3 = group("symmetric(3)")
    assert st.commutator_subgroup(s3, s3).order == 3
    a4 = group("alternating(4)")
    klein = st.fitting_subgroup(a4)
    assert st.commutator_subgroup(st.whole_group(a4), klein).members == \
        klein.members  # [G, N] = N


def test_centralizer_and_center():
    d6 = group("dihedral(6)")
    assert st.centralizer(d6, {0}).order == 6
    assert st.center(d6).order == 1
    sl = group("sl23")
    z = st.center(sl)
    assert z.order == 2
    assert [m.sorted_members for m in st.minimal_normal_subgroups(sl)] == \
        [z.sorted_members]


# --- series -------------------------------------------------------------------

def test_derived_series_abelian():
    series = st.derived_series(group("cyclic(12)"))
    assert [s.order for s in series] == [12, 1]


def test_derived_series_s4():
    series = st.derived_series(group("symmetric(4)"))
    assert [s.order for s in series] == [24, 12, 4, 1]


def test_lower_central_series_quaternion():
    series = st.lower_central_series(group("quaternion"))
    assert [s.order for s in series] == [8, 2, 1]


def test_upper_central_series():
    q8 = group("quaternion")
    assert [s.order for s in st.upper_central_series(q8)] == [2, 8]
    d6 = group("dihedral(6)")
    assert [s.order for s in st.upper_central_series(d6)] == [1]


def test_solvability_flags():
    assert st.is_nilpotent(group("cyclic(12)"))
    assert st.is_solvable(group("dihedral(6)"))
    assert not st.is_nilpotent(group("dihedral(6)"))
    assert not st.is_solvable(group("alternating(5)"))


# --- Fitting subgroup ---------------------------------------------------------

def test_fitting_nilpotent_group_is_whole():
    q8 = group("quaternion")
    assert st.fitting_subgroup(q8).order == 8


def test_fitting_a4_is_klein():
    a4 = group("alternating(4)")
    fit = st.fitting_subgroup(a4)
    assert fit.order == 4
    assert all(g == 0 or a4.element_order(g) == 2 for g in fit.members)


def test_fitting_d6_is_rotations():
    d6 = group("dihedral(6)")
    assert members(st.fitting_subgroup(d6)) == {0, 1, 2}


@pytest.mark.parametrize("spec", corpus(48))
def test_fitting_engel_equals_enumeration_oracle(spec):
    g = group(spec)
    engel = st.fitting_subgroup(g)
    oracle = st.fitting_subgroup_via_normal_subgroups(g)
    assert engel.members == oracle.members


# --- quotients ----------------------------------------------------------------

def test_quotient_by_trivial_is_same_table():
    d6 = group("dihedral(6)")
    qm = st.quotient(d6, st.trivial_subgroup(d6))
    assert qm.quotient.order == 6
    assert (qm.quotient.mul_table == d6.mul_table).all()


def test_quotient_requires_normal():
    d6 = group("dihedral(6)")
    reflection_sub = st.closure(d6, {3})
    assert not reflection_sub.is_normal
    with pytest.raises(NotNormal):
        st.quotient(d6, reflection_sub)


def test_quotient_sl23_by_center_looks_like_a4():
    sl = group("sl23")
    qm = st.quotient(sl, st.center(sl))
    q = qm.quotient
    assert q.order == 12
    assert st.center(q).order == 1
    assert st.commutator_subgroup(q, q).order == 4


def test_quotient_s4_by_klein():
    s4 = group("symmetric(4)")
    klein = st.fitting_subgroup(s4)
    assert klein.order == 4
    q = st.quotient(s4, klein).quotient
    assert q.order == 6
    assert not q.is_abelian


def test_quotient_map_is_homomorphism():
    for spec in ("dihedral(12)", "sl23", "symmetric(4)"):
        g = group(spec)
        for kernel in st.minimal_normal_subgroups(g):
            qm = st.quotient(g, kernel)
            for a in g.elements():
                for b in g.elements():
                    assert qm.apply(g.mul(a, b)) == \
                        qm.quotient.mul(qm.apply(a), qm.apply(b))


# --- minimal normal subgroups --------------------------------------------------

def test_minimal_normals_simple_group():
    a5 = group("alternating(5)")
    mins = st.minimal_normal_subgroups(a5)
    assert len(mins) == 1
    assert mins[0].order == 60


def test_minimal_normals_dihedral10():
    mins = st.minimal_normal_subgroups(group("dihedral(10)"))
    assert len(mins) == 1
    assert members(mins[0]) == {0, 1, 2, 3, 4}


def test_minimal_normals_dihedral12_has_two():
    mins = st.minimal_normal_subgroups(group("dihedral(12)"))
    assert sorted(m.order for m in mins) == [2, 3]


def test_minimal_normal_is_closure_of_each_element():
    for spec in ("alternating(4)", "dihedral(12)", "sl23",
                 "product(cyclic(3),symmetric(3))"):
        g = group(spec)
        for m in st.minimal_normal_subgroups(g):
            for a in m.members:
                if a:
                    assert st.normal_closure(g, a).members == m.members


# --- classification -----------------------------------------------------------

def test_last_non_nilpotent_errors():
    with pytest.raises(IsNilpotent):
        st.last_non_nilpotent_derived(group("cyclic(12)"))
    with pytest.raises(NotSolvable):
        st.last_non_nilpotent_derived(group("alternating(5)"))


def test_last_non_nilpotent_values():
    assert st.last_non_nilpotent_derived(group("dihedral(6)")).order == 6
    assert st.last_non_nilpotent_derived(group("alternating(4)")).order == 12
    assert st.last_non_nilpotent_derived(group("symmetric(4)")).order == 12


def test_classify_table():
    assert st.classify(group("cyclic(12)")).kind == st.CASE_NILPOTENT
    assert st.classify(group("quaternion")).kind == st.CASE_NILPOTENT
    assert st.classify(group("alternating(5)")).kind == st.CASE_NON_SOLVABLE

    a4 = st.classify(group("alternating(4)"))
    assert (a4.kind, a4.quotient_exponent) == (st.CASE_ONE, 3)
    s4 = st.classify(group("symmetric(4)"))
    assert (s4.kind, s4.quotient_exponent) == (st.CASE_ONE, 3)
    assert s4.last_non_nilpotent.order == 12

    for spec in ("dihedral(6)", "dihedral(10)", "dihedral(14)"):
        c = st.classify(group(spec))
        assert (c.kind, c.quotient_exponent) == (st.CASE_TWO, 2)

    # SL(2,3): L is the whole group, F(L) the quaternion subgroup of order 8,
    # so the quotient is cyclic of order 3 and the exponent is 3.
    sl = st.classify(group("sl23"))
    assert (sl.kind, sl.quotient_exponent) == (st.CASE_ONE, 3)
    assert sl.fitting_order == 8


# --- reduction targets ---------------------------------------------------------

def _check_target(g, target):
    H = target.group
    N = target.minimal_normal
    whole = st.whole_group(H)
    assert st.commutator_subgroup(whole, N).members == N.members
    derived = st.commutator_subgroup(whole, whole)
    assert st.commutator_subgroup(derived, N).order == 1
    assert any(m.members == N.members
               for m in st.minimal_normal_subgroups(H))
    cent = st.centralizer(H, N.members)
    assert (H.order // cent.order > 2) == target.index_over_2


def test_equation_target_a4():
    t = st.equation_target(group("alternating(4)"))
    assert t.group.order == 12
    assert t.minimal_normal.order == 4
    assert [q.kernel.order for q in t.chain] == [1]
    assert t.index_over_2
    cent = st.centralizer(t.group, t.minimal_normal.members)
    assert t.group.order // cent.order == 3
    _check_target(group("alternating(4)"), t)


def test_equation_target_d6():
    t = st.equation_target(group("dihedral(6)"))
    assert t.group.order == 6
    assert t.minimal_normal.order == 3
    assert not t.index_over_2
    _check_target(group("dihedral(6)"), t)


def test_equation_target_sl23_chain_nontrivial():
    t = st.equation_target(group("sl23"))
    assert [q.kernel.order for q in t.chain] == [2]
    assert t.group.order == 12
    assert t.minimal_normal.order == 4
    assert t.index_over_2
    _check_target(group("sl23"), t)


def test_identity_target_a4_terminates_immediately():
    t = st.identity_target(group("alternating(4)"))
    assert t.group.order == 12
    assert t.minimal_normal.order == 4
    assert t.chain == ()


def test_identity_target_sl23_takes_a_step():
    t = st.identity_target(group("sl23"))
    assert len(t.chain) >= 1
    assert t.group.order == 12
    _check_target(group("sl23"), t)


def test_identity_target_d6():
    t = st.identity_target(group("dihedral(6)"))
    assert t.group.order == 6
    assert t.minimal_normal.order == 3
    _check_target(group("dihedral(6)"), t)


def test_targets_error_on_wrong_groups():
    with pytest.raises(IsNilpotent):
        st.equation_target(group("quaternion"))
    with pytest.raises(NotSolvable):
        st.identity_target(group("alternating(5)"))


@pytest.mark.parametrize("spec", solvable_non_nilpotent(48))
def test_targets_postconditions_corpus(spec):
    g = group(spec)
    for build in (st.equation_target, st.identity_target):
        _check_target(g, build(g))


# --- facts about (H, N) pairs ---------------------------------------------------

def _target_pairs():
    for spec in solvable_non_nilpotent(48):
        g = group(spec)
        for build in (st.equation_target, st.identity_target):
            yield spec, build(g)


def test_centralizer_absorption_fact():
    """[n, f] = [n, fg] = [n, gf] for g centralizing N."""
    for spec, target in _target_pairs():
        H = target.group
        N = target.minimal_normal
        cent = st.centralizer(H, N.members)
        for n in N.members:
            for f in H.elements():
                base = H.commutator(n, f)
                for g in sorted(cent.members)[:6]:
                    assert base == H.commutator(n, H.mul(f, g))
                    assert base == H.commutator(n, H.mul(g, f))


def test_abelian_additivity_fact():
    """[n, b] [m, b] = [nm, b] on abelian normal subgroups."""
    for spec, target in _target_pairs():
        H = target.group
        N = target.minimal_normal
        for n in N.members:
            for m in N.members:
                for b in H.elements():
                    assert H.mul(H.commutator(n, b), H.commutator(m, b)) == \
                        H.commutator(H.mul(n, m), b)
