"""Matrix-unit families: subbase audit, classification, structure, bases,
and normalization."""

import pytest

from endorank.endo import Endomorphism, compose, kronecker_endo, rank
from endorank.errors import (
    ConstantTermSurvives,
    NoFixedPointFound,
    NonAffineImage,
    RelationViolation,
    ZeroScale,
)
from endorank.fields import GF2, GF3, GF4, QQ
from endorank.kronecker import (
    KroneckerSystem,
    RepresentationKind,
    check_internal_base_condition,
    classify_representation,
    image_generator,
    normalize_base,
    structure_analysis,
    verify_base_external,
    verify_subbase,
)
from endorank.parsing import parse_polynomial


def P(s, spec=QQ, n=2):
    return parse_polynomial(s, spec, n)


def endo(spec, *images):
    n = len(images)
    return Endomorphism(spec, n, tuple(parse_polynomial(s, spec, n) for s in images))


def two_generator_system():
    # e(1,1) projects onto K[x1 + x1*x2]; that algebra together with K[x2]
    # generates a proper subalgebra (x1 itself is unreachable), so this
    # family is a subbase that is not a base.
    e11 = endo(QQ, "x1 + x1*x2", "0")
    e12 = endo(QQ, "0", "x1 + x1*x2")
    e21 = endo(QQ, "x2", "0")
    e22 = endo(QQ, "0", "x2")
    return KroneckerSystem(
        QQ, 2, ((e11, e12), (e21, e22)), Endomorphism.zero(QQ, 2)
    )


def conjugated(system, s, s_inv):
    return system.transformed(lambda e: compose(compose(s, e), s_inv))


# -- construction ----------------------------------------------------------------


def test_grid_shape_is_checked():
    e = kronecker_endo(QQ, 2, 1, 1)
    with pytest.raises(RelationViolation):
        KroneckerSystem(QQ, 2, ((e, e),), None)
    with pytest.raises(RelationViolation):
        KroneckerSystem(QQ, 2, ((e,), (e,)), None)
    with pytest.raises(RelationViolation):
        KroneckerSystem(
            QQ, 2, ((e, e), (e, kronecker_endo(QQ, 3, 1, 1))), None
        )


def test_entry_accessor_is_one_based():
    S = KroneckerSystem.standard(QQ, 2)
    assert str(S.entry(1, 2)) == "x1 -> 0; x2 -> x1"
    assert str(S.entry(2, 1)) == "x1 -> x2; x2 -> 0"


# -- subbase audit ---------------------------------------------------------------


@pytest.mark.parametrize("spec", [QQ, GF2, GF3, GF4])
@pytest.mark.parametrize("n", [2, 3])
def test_standard_families_are_subbases(spec, n):
    report = verify_subbase(KroneckerSystem.standard(spec, n))
    assert report.ok
    assert report.problems == ()
    assert report.zero == Endomorphism.zero(spec, n)
    # n^4 products plus two absorption checks per entry
    assert report.relations_checked == n**4 + 2 * n**2


def test_two_generator_family_is_a_subbase():
    report = verify_subbase(two_generator_system())
    assert report.ok
    assert report.relations_checked == 24


def test_subbase_audit_rejects_wrong_entry():
    # swapping in x1 -> x1 at position (2,1) breaks a whole cluster of
    # products; the audit names each one
    e11 = endo(QQ, "x1 + x1*x2", "0")
    e12 = endo(QQ, "0", "x1 + x1*x2")
    e21 = endo(QQ, "x1", "0")
    e22 = endo(QQ, "0", "x2")
    broken = KroneckerSystem(
        QQ, 2, ((e11, e12), (e21, e22)), Endomorphism.zero(QQ, 2)
    )
    report = verify_subbase(broken)
    assert not report.ok
    assert "(1,2).(2,1) != (1,1)" in report.problems
    assert any("disagrees with the common zero" in p for p in report.problems)


def test_subbase_audit_rejects_wrong_declared_zero():
    grid = tuple(
        tuple(kronecker_endo(QQ, 2, i, j) for j in (1, 2)) for i in (1, 2)
    )
    system = KroneckerSystem(QQ, 2, grid, Endomorphism.constant(QQ, 2, [1, 1]))
    report = verify_subbase(system)
    assert not report.ok
    assert "declared zero differs from the common product zero" in report.problems


def test_subbase_audit_rejects_zero_entries():
    zero = Endomorphism.zero(QQ, 2)
    sink = KroneckerSystem(QQ, 2, ((zero, zero), (zero, zero)), zero)
    report = verify_subbase(sink)
    assert not report.ok
    assert "entry (1,1) equals the zero map" in report.problems


# -- classification ---------------------------------------------------------------


def test_classify_standard_as_nonsingular():
    for spec in (QQ, GF2, GF4):
        kind = classify_representation(KroneckerSystem.standard(spec, 2))
        assert kind is RepresentationKind.NONSINGULAR
    assert (
        classify_representation(two_generator_system())
        is RepresentationKind.NONSINGULAR
    )


def test_classify_collapsed_family_as_singular():
    # every entry equal to the zero map satisfies all the relations; it is a
    # representation (the degenerate one) without being a subbase
    zero = Endomorphism.zero(QQ, 2)
    sink = KroneckerSystem(QQ, 2, ((zero, zero), (zero, zero)), zero)
    assert classify_representation(sink) is RepresentationKind.SINGULAR
    assert not verify_subbase(sink).ok


def test_classify_requires_explicit_zero():
    grid = tuple(
        tuple(kronecker_endo(QQ, 2, i, j) for j in (1, 2)) for i in (1, 2)
    )
    with pytest.raises(RelationViolation):
        classify_representation(KroneckerSystem(QQ, 2, grid, None))


def test_classify_rejects_relation_violations():
    e11 = endo(QQ, "x1 + x1*x2", "0")
    e12 = endo(QQ, "0", "x1 + x1*x2")
    e21 = endo(QQ, "x1", "0")
    e22 = endo(QQ, "0", "x2")
    broken = KroneckerSystem(
        QQ, 2, ((e11, e12), (e21, e22)), Endomorphism.zero(QQ, 2)
    )
    with pytest.raises(RelationViolation):
        classify_representation(broken)


def test_classify_rejects_mixed_family():
    # one entry replaced by the zero map: neither all-zero nor all-rank-one
    zero = Endomorphism.zero(QQ, 2)
    grid = (
        (kronecker_endo(QQ, 2, 1, 1), kronecker_endo(QQ, 2, 1, 2)),
        (kronecker_endo(QQ, 2, 2, 1), zero),
    )
    with pytest.raises(RelationViolation):
        classify_representation(KroneckerSystem(QQ, 2, grid, zero))


# -- structure analysis ------------------------------------------------------------


def test_structure_of_the_standard_family():
    report = structure_analysis(KroneckerSystem.standard(QQ, 2))
    assert report.fixed_point == (QQ.element(0), QQ.element(0))
    assert report.constant_terms_vanish
    assert report.matrix_units_ok
    assert report.problems == ()
    # the linear part of entry (1,2) is the matrix unit E_12
    assert report.linear_parts[0][1] == (
        (QQ.element(0), QQ.element(1)),
        (QQ.element(0), QQ.element(0)),
    )


def test_structure_finds_hidden_fixed_point():
    # conjugating by x -> x + c moves the common fixed point to -c; only
    # the full diagonal sweep reaches it from the scheduled start points
    s = endo(QQ, "x1 + 1", "x2 + 2")
    s_inv = endo(QQ, "x1 - 1", "x2 - 2")
    moved = conjugated(KroneckerSystem.standard(QQ, 2), s, s_inv)
    assert verify_subbase(moved).ok
    report = structure_analysis(moved)
    assert report.fixed_point == (QQ.element(-1), QQ.element(-2))
    assert report.matrix_units_ok


def test_structure_over_finite_field_enumerates():
    s = endo(GF3, "x1 + 1", "x2 + 2")
    s_inv = endo(GF3, "x1 - 1", "x2 - 2")
    moved = conjugated(KroneckerSystem.standard(GF3, 2), s, s_inv)
    report = structure_analysis(moved)
    assert report.fixed_point == (GF3.element(-1), GF3.element(-2))
    assert report.matrix_units_ok


def test_structure_rejects_surviving_constants():
    grid = (
        (kronecker_endo(QQ, 2, 1, 1), kronecker_endo(QQ, 2, 1, 2)),
        (kronecker_endo(QQ, 2, 2, 1), endo(QQ, "0", "x2 + 1")),
    )
    with pytest.raises(ConstantTermSurvives):
        structure_analysis(KroneckerSystem(QQ, 2, grid, None))


def test_structure_needs_a_fixed_point_somewhere():
    # x1 + 1 permutes GF(2) without fixed points
    flip = Endomorphism(GF2, 1, (parse_polynomial("x1 + 1", GF2, 1),))
    system = KroneckerSystem(GF2, 1, ((flip,),), None)
    with pytest.raises(NoFixedPointFound):
        structure_analysis(system)


# -- image generators ---------------------------------------------------------------


def test_image_generator_for_standard_diagonals():
    S = KroneckerSystem.standard(QQ, 2)
    assert str(image_generator(S.entry(1, 1))) == "x1"
    assert str(image_generator(S.entry(2, 2))) == "x2"


def test_image_generator_accepts_hints_first():
    S = KroneckerSystem.standard(QQ, 2)
    z = image_generator(S.entry(1, 1), hints=(P("2*x1"),))
    assert str(z) == "2*x1"


def test_image_generator_for_nonlinear_idempotent():
    phi = endo(QQ, "x1 + x1*x2", "0")
    assert str(image_generator(phi)) == "x1*x2 + x1"


def test_image_generator_preconditions():
    with pytest.raises(RelationViolation, match="idempotent"):
        image_generator(endo(QQ, "x1^2", "0"))
    with pytest.raises(RelationViolation, match="rank 1"):
        image_generator(Endomorphism.identity(QQ, 2))


def test_image_generator_can_miss_and_hints_rescue_it():
    # a retraction onto K[x1 + x2^2] whose defining images hide the
    # generator from every scheduled candidate
    z = P("x1 + x2^2")
    phi = Endomorphism(QQ, 2, (z - z**4, z**2))
    assert compose(phi, phi) == phi
    assert rank(phi).value == 1
    assert image_generator(phi) is None
    assert image_generator(phi, hints=(z,)) == z


# -- external base checks --------------------------------------------------------------


@pytest.mark.parametrize("spec", [QQ, GF2, GF3, GF4])
@pytest.mark.parametrize("n", [2, 3])
def test_standard_families_are_bases(spec, n):
    check = verify_base_external(KroneckerSystem.standard(spec, n))
    assert check.is_base
    assert check.missing == ()
    assert [str(g) for g in check.generators] == [f"x{k}" for k in range(1, n + 1)]
    assert check.certificate is not None
    assert check.certificate.validate() == []


def test_two_generator_family_fails_the_base_check():
    check = verify_base_external(two_generator_system())
    assert not check.is_base
    assert check.missing == (1,)
    assert [str(g) for g in check.generators] == ["x1*x2 + x1", "x2"]
    assert check.certificate is None


def test_base_check_with_explicit_generators():
    S = KroneckerSystem.standard(QQ, 2)
    check = verify_base_external(S, Z=(P("2*x1"), P("3*x2")))
    assert check.is_base
    assert [str(w) for w in check.certificate.witnesses] == ["1/2*x1", "1/3*x2"]


def test_base_check_requires_a_subbase():
    zero = Endomorphism.zero(QQ, 2)
    sink = KroneckerSystem(QQ, 2, ((zero, zero), (zero, zero)), zero)
    with pytest.raises(RelationViolation):
        verify_base_external(sink)


# -- normalization -----------------------------------------------------------------------


def test_normalize_rescales_generators():
    S = KroneckerSystem.standard(QQ, 2)
    check = verify_base_external(S, Z=(P("2*x1"), P("3*x2")))
    result = normalize_base(S, check.certificate)
    assert [str(g) for g in result.certificate.generators] == ["x1", "x2"]
    assert result.certificate.normalized
    assert result.gammas == (QQ.element(0), QQ.element(0))
    assert result.scales == (
        (QQ.element(1), QQ.element("3/2")),
        (QQ.element("2/3"), QQ.element(1)),
    )
    assert result.alphas == (QQ.element(1), QQ.element("2/3"))
    assert result.global_scale == QQ.element("1/2")


def test_normalize_over_gf4():
    S = KroneckerSystem.standard(GF4, 2)
    t = GF4.generator()
    check = verify_base_external(S, Z=(P("t*x1", GF4), P("x2", GF4)))
    result = normalize_base(S, check.certificate)
    assert [str(g) for g in result.certificate.generators] == ["x1", "x2"]
    assert result.alphas == (GF4.element(1), t)
    assert result.global_scale == t.inverse()


def test_normalize_recenters_translated_family():
    s = endo(QQ, "x1 + 1", "x2 + 2")
    s_inv = endo(QQ, "x1 - 1", "x2 - 2")
    moved = conjugated(KroneckerSystem.standard(QQ, 2), s, s_inv)
    check = verify_base_external(moved)
    assert [str(g) for g in check.generators] == ["x1", "x2"]
    result = normalize_base(moved, check.certificate)
    # the exact unit action for the moved family holds for the recentered
    # generators, not the raw coordinates
    assert [str(g) for g in result.certificate.generators] == ["x1 + 1", "x2 + 2"]
    assert result.gammas == (QQ.element(-1), QQ.element(-2))
    z1, z2 = result.certificate.generators
    assert moved.entry(1, 2).apply(z2) == z1
    assert moved.entry(2, 1).apply(z2).is_zero


def test_normalize_conjugated_by_nonlinear_automorphism():
    s = endo(QQ, "x1 + x2^2", "x2")
    s_inv = endo(QQ, "x1 - x2^2", "x2")
    twisted = conjugated(KroneckerSystem.standard(QQ, 2), s, s_inv)
    assert verify_subbase(twisted).ok
    check = verify_base_external(twisted)
    assert check.is_base
    result = normalize_base(twisted, check.certificate)
    z = result.certificate.generators
    assert [str(g) for g in z] == ["x2^2 + x1", "x2"]
    for i in (1, 2):
        for j in (1, 2):
            for k in (1, 2):
                got = twisted.entry(i, j).apply(z[k - 1])
                if j == k:
                    assert got == z[i - 1]
                else:
                    assert got.is_zero


def test_normalize_rejects_nonaffine_generator_action():
    S = KroneckerSystem.standard(QQ, 2)
    check = verify_base_external(S, Z=(P("x1"), P("x2 + x1^2")))
    assert check.is_base  # a base, but not compatibly aligned with the units
    with pytest.raises(NonAffineImage):
        normalize_base(S, check.certificate)


def test_normalize_rejects_swapped_generators():
    S = KroneckerSystem.standard(QQ, 2)
    check = verify_base_external(S, Z=(P("x2"), P("x1")))
    with pytest.raises(ZeroScale):
        normalize_base(S, check.certificate)


def test_normalize_input_validation():
    S = KroneckerSystem.standard(QQ, 2)
    check = verify_base_external(S, Z=(P("2*x1"), P("3*x2")))
    with pytest.raises(RelationViolation):
        normalize_base(KroneckerSystem.standard(QQ, 3), check.certificate)
    result = normalize_base(S, check.certificate)
    with pytest.raises(RelationViolation):
        normalize_base(S, result.certificate)  # already normalized


# -- the internal base condition ----------------------------------------------------------


def test_internal_condition_against_two_generator_family():
    S = KroneckerSystem.standard(QQ, 2)
    cert = verify_base_external(S).certificate
    identities = (Endomorphism.identity(QQ, 2), Endomorphism.identity(QQ, 2))
    report = check_internal_base_condition(cert, two_generator_system(), identities)
    assert report.ok
    assert report.problems == ()
    assert [str(i) for i in report.psi.images] == ["x1*x2 + x1", "x2"]


def test_internal_condition_against_itself():
    S = KroneckerSystem.standard(QQ, 2)
    cert = verify_base_external(S).certificate
    identities = (Endomorphism.identity(QQ, 2), Endomorphism.identity(QQ, 2))
    report = check_internal_base_condition(cert, S, identities)
    assert report.ok
    assert report.phi.is_identity


def test_internal_condition_input_validation():
    S = KroneckerSystem.standard(QQ, 2)
    cert = verify_base_external(S).certificate
    ident = Endomorphism.identity(QQ, 2)
    with pytest.raises(RelationViolation):
        check_internal_base_condition(cert, KroneckerSystem.standard(QQ, 3), (ident, ident))
    with pytest.raises(RelationViolation):
        check_internal_base_condition(cert, S, (ident,))
    zero = Endomorphism.zero(QQ, 2)
    sink = KroneckerSystem(QQ, 2, ((zero, zero), (zero, zero)), zero)
    with pytest.raises(RelationViolation):
        check_internal_base_condition(cert, sink, (ident, ident))
