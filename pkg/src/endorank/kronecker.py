"""Matrix-unit families of endomorphisms: subbase verification, structure
analysis, base extraction, and normalization.

A KroneckerSystem is an n x n grid of endomorphisms expected to multiply like
matrix units: entry(i,j) . entry(k,m) equals entry(i,m) when j = k and a
single common rank-0 map otherwise.  The common zero is discovered from the
products themselves, so systems obtained by conjugating the standard one
(whose zero is a constant map at some point, not necessarily the origin)
verify cleanly.

A subbase becomes a base when the diagonal image generators z_1..z_n
generate the whole polynomial algebra; that is decided by subalgebra
membership, certified with explicit witnesses, and cross-checked against map
inversion.  normalize_base rescales and recenters the generators so the
matrix-unit action becomes literally e(i,j): z_j -> z_i, all other z -> 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

from .endo import Endomorphism, compose, kronecker_endo, rank
from .errors import (
    ConstantTermSurvives,
    GeneratorNotFound,
    NoFixedPointFound,
    NonAffineImage,
    RelationViolation,
    ZeroScale,
)
from .fields import FieldElement, FieldSpec
from .groebner import invert_poly_map, subalgebra_member
from .mpoly import GREVLEX, MultiPoly

_ENUM_POINT_CAP = 4096  # max points enumerated in fixed-point search


@dataclass(frozen=True)
class KroneckerSystem:
    """An n x n family of endomorphisms indexed 1-based via entry(i, j),
    with an optional explicit zero element."""

    spec: FieldSpec
    n: int
    entries: tuple[tuple[Endomorphism, ...], ...]
    zero: Optional[Endomorphism] = None

    def __post_init__(self):
        if len(self.entries) != self.n or any(
            len(row) != self.n for row in self.entries
        ):
            raise RelationViolation(f"entry grid is not {self.n} x {self.n}")
        for row in self.entries:
            for e in row:
                if e.spec != self.spec or e.nvars != self.n:
                    raise RelationViolation(
                        "entries must share the system's field and arity"
                    )
        if self.zero is not None and (
            self.zero.spec != self.spec or self.zero.nvars != self.n
        ):
            raise RelationViolation("zero element over the wrong ring")

    def entry(self, i: int, j: int) -> Endomorphism:
        return self.entries[i - 1][j - 1]

    @staticmethod
    def standard(spec: FieldSpec, n: int) -> "KroneckerSystem":
        grid = tuple(
            tuple(kronecker_endo(spec, n, i, j) for j in range(1, n + 1))
            for i in range(1, n + 1)
        )
        return KroneckerSystem(spec, n, grid, Endomorphism.zero(spec, n))

    def transformed(
        self, fn: Callable[[Endomorphism], Endomorphism]
    ) -> "KroneckerSystem":
        """Apply fn to every entry (and the zero, if present); used to build
        conjugated and translated variants."""
        grid = tuple(tuple(fn(e) for e in row) for row in self.entries)
        zero = fn(self.zero) if self.zero is not None else None
        return KroneckerSystem(grid[0][0].spec, self.n, grid, zero)


# -- relation checking -----------------------------------------------------------


def _relation_violations(
    system: KroneckerSystem,
) -> tuple[list[str], Optional[Endomorphism], int]:
    """Check all n^4 products.  Returns (violations, common zero, #checks).
    The common zero is the shared value of every delta=0 product; it is None
    when n = 1 (no such products exist)."""
    n = system.n
    checked = 0
    problems: list[str] = []
    zero_hat: Optional[Endomorphism] = None

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            e_ij = system.entry(i, j)
            for k in range(1, n + 1):
                for m in range(1, n + 1):
                    checked += 1
                    prod = compose(e_ij, system.entry(k, m))
                    if j == k:
                        if prod != system.entry(i, m):
                            problems.append(
                                f"({i},{j}).({k},{m}) != ({i},{m})"
                            )
                    elif zero_hat is None:
                        zero_hat = prod
                    elif prod != zero_hat:
                        problems.append(
                            f"({i},{j}).({k},{m}) disagrees with the common zero"
                        )

    if system.zero is not None:
        if zero_hat is not None and system.zero != zero_hat:
            problems.append("declared zero differs from the common product zero")
        z = system.zero
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                e = system.entry(i, j)
                checked += 2
                if compose(e, z) != z:
                    problems.append(f"({i},{j}).zero != zero")
                if compose(z, e) != z:
                    problems.append(f"zero.({i},{j}) != zero")
        if zero_hat is None:
            zero_hat = z
    return problems, zero_hat, checked


@dataclass(frozen=True)
class SubbaseReport:
    ok: bool
    zero: Optional[Endomorphism]
    relations_checked: int
    problems: tuple[str, ...]


def verify_subbase(system: KroneckerSystem) -> SubbaseReport:
    """Full audit: all n^4 matrix-unit products, one common rank-0 zero, no
    entry equal to that zero, and every entry of elimination rank exactly 1."""
    problems, zero_hat, checked = _relation_violations(system)

    if zero_hat is not None:
        z_rank = rank(zero_hat).value
        if z_rank != 0:
            problems.append(f"common zero has rank {z_rank}, expected 0")

    for i in range(1, system.n + 1):
        for j in range(1, system.n + 1):
            e = system.entry(i, j)
            if zero_hat is not None and e == zero_hat:
                problems.append(f"entry ({i},{j}) equals the zero map")
                continue
            r = rank(e).value
            if r != 1:
                problems.append(f"entry ({i},{j}) has rank {r}, expected 1")

    return SubbaseReport(not problems, zero_hat, checked, tuple(problems))


class RepresentationKind(Enum):
    SINGULAR = "singular"
    NONSINGULAR = "nonsingular"


def classify_representation(system: KroneckerSystem) -> RepresentationKind:
    """Split verified matrix-unit families into the two possible shapes:
    everything collapses to one rank-0 map (singular), or every entry has
    rank exactly 1 (nonsingular).  The (1,1) rank decides; the rest of the
    grid is then verified to conform and any straggler raises."""
    if system.zero is None:
        raise RelationViolation("classification requires an explicit zero element")
    problems, _, _ = _relation_violations(system)
    if problems:
        raise RelationViolation(
            "matrix-unit relations fail: " + "; ".join(problems[:5])
        )
    if rank(system.zero).value != 0:
        raise RelationViolation("the declared zero element does not have rank 0")

    if rank(system.entry(1, 1)).value == 0:
        for i in range(1, system.n + 1):
            for j in range(1, system.n + 1):
                if system.entry(i, j) != system.zero:
                    raise RelationViolation(
                        f"singular family, but entry ({i},{j}) differs from zero"
                    )
        return RepresentationKind.SINGULAR

    for i in range(1, system.n + 1):
        for j in range(1, system.n + 1):
            r = rank(system.entry(i, j)).value
            if r != 1:
                raise RelationViolation(
                    f"nonsingular family, but entry ({i},{j}) has rank {r}"
                )
    return RepresentationKind.NONSINGULAR


# -- structure analysis ------------------------------------------------------------


Matrix = tuple[tuple[FieldElement, ...], ...]


def _mat_mul(spec: FieldSpec, a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(
            sum(
                (a[r][c] * b[c][s] for c in range(n)),
                start=spec.zero(),
            )
            for s in range(n)
        )
        for r in range(n)
    )


def _mat_is_zero(m: Matrix) -> bool:
    return all(v.is_zero for row in m for v in row)


@dataclass(frozen=True)
class StructureReport:
    fixed_point: tuple[FieldElement, ...]
    translated: KroneckerSystem
    constant_terms_vanish: bool
    linear_parts: tuple[tuple[Matrix, ...], ...]  # [i-1][j-1]
    matrix_units_ok: bool
    problems: tuple[str, ...]


def _translate_endo(e: Endomorphism, d: Sequence[FieldElement]) -> Endomorphism:
    """Conjugate by the translation x -> x + d: new images are
    e_k(x + d) - d_k, so a fixed point d of the point map moves to the
    origin."""
    spec = e.spec
    n = e.nvars
    shifted = [
        MultiPoly.variable(spec, n, b) + MultiPoly.constant(spec, n, d[b])
        for b in range(n)
    ]
    images = tuple(
        img.substitute(shifted) - MultiPoly.constant(spec, n, d[k])
        for k, img in enumerate(e.images)
    )
    return Endomorphism(spec, n, images)


def _fixed_point_candidates(system: KroneckerSystem, seed: int):
    """Schedule: origin and all-ones; their images under each diagonal; the
    full diagonal sweep (entry (n,n) after .. after entry (1,1), which walks
    any starting point onto the common fixed locus coordinate by
    coordinate); then brute force — every point over a small finite field,
    seeded integer points over Q."""
    spec = system.spec
    n = system.n
    base_points = [
        tuple(spec.zero() for _ in range(n)),
        tuple(spec.one() for _ in range(n)),
    ]
    for p in base_points:
        yield p
    for p in base_points:
        for j in range(1, n + 1):
            yield system.entry(j, j).point_map(p)
    for p in base_points:
        cur = p
        for j in range(1, n + 1):
            cur = system.entry(j, j).point_map(cur)
        yield cur
    if spec.is_finite:
        from .fields import enumerate_elements

        if spec.order**n <= _ENUM_POINT_CAP:
            elems = list(enumerate_elements(spec))

            def walk(prefix):
                if len(prefix) == n:
                    yield tuple(prefix)
                    return
                for v in elems:
                    yield from walk(prefix + [v])

            yield from walk([])
    else:
        rng = random.Random(7919 + seed)
        for _ in range(32):
            yield tuple(
                spec.element(rng.randint(-5, 5)) for _ in range(n)
            )


def structure_analysis(system: KroneckerSystem, seed: int = 0) -> StructureReport:
    """Find a common fixed point of the whole family, translate it to the
    origin, and check that what remains is linear-looking: no constant
    terms, and degree-1 parts multiplying exactly like matrix units.

    Candidates are accepted only if the fully translated system has no
    constant terms anywhere (equivalent to being fixed by every entry).
    NoFixedPointFound means not even entry (1,1) fixed any candidate;
    ConstantTermSurvives means some points were (1,1)-fixed but none was
    fixed by the whole family.
    """
    n = system.n
    saw_diagonal_fixed = False
    seen: set = set()
    for point in _fixed_point_candidates(system, seed):
        key = tuple(v.raw for v in point)
        if key in seen:
            continue
        seen.add(key)
        if system.entry(1, 1).point_map(point) != tuple(point):
            continue
        saw_diagonal_fixed = True
        translated = system.transformed(lambda e: _translate_endo(e, point))
        if all(
            img.constant_term().is_zero
            for row in translated.entries
            for e in row
            for img in e.images
        ):
            return _finish_structure_report(system, point, translated)
    if saw_diagonal_fixed:
        raise ConstantTermSurvives(
            "points fixed by entry (1,1) exist, but none is fixed by the "
            "whole family; translation cannot remove all constant terms"
        )
    raise NoFixedPointFound(
        "no candidate point is fixed by entry (1,1); over a small finite "
        "field the fixed point may only exist after a field extension"
    )


def _finish_structure_report(
    system: KroneckerSystem,
    point: tuple[FieldElement, ...],
    translated: KroneckerSystem,
) -> StructureReport:
    spec = system.spec
    n = system.n
    parts = tuple(
        tuple(translated.entry(i, j).linear_part() for j in range(1, n + 1))
        for i in range(1, n + 1)
    )
    problems: list[str] = []
    zero_mat = tuple(
        tuple(spec.zero() for _ in range(n)) for _ in range(n)
    )
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                for m in range(1, n + 1):
                    prod = _mat_mul(
                        spec, parts[i - 1][j - 1], parts[k - 1][m - 1]
                    )
                    want = parts[i - 1][m - 1] if j == k else zero_mat
                    if prod != want:
                        problems.append(
                            f"L({i},{j}).L({k},{m}) != "
                            + (f"L({i},{m})" if j == k else "0")
                        )
    return StructureReport(
        fixed_point=tuple(point),
        translated=translated,
        constant_terms_vanish=True,
        linear_parts=parts,
        matrix_units_ok=not problems,
        problems=tuple(problems),
    )


# -- image generators and bases -----------------------------------------------------


def image_generator(
    phi: Endomorphism, hints: Sequence[MultiPoly] = ()
) -> Optional[MultiPoly]:
    """A single polynomial z with K[phi-images] = K[z], for an idempotent of
    rank 1.  Candidates: supplied hints, then the nonconstant images from
    low degree up, then constant-free shifts of those, then their degree-1
    parts.  Each candidate must contain every image (membership witnessed)
    and itself lie in the image algebra.  Heuristic-complete: None means no
    candidate verified, not that no generator exists."""
    if compose(phi, phi) != phi:
        raise RelationViolation(
            "generator extraction requires an idempotent map"
        )
    r = rank(phi).value
    if r != 1:
        raise RelationViolation(
            f"generator extraction requires rank 1, got rank {r}"
        )

    candidates: list[MultiPoly] = list(hints)
    images = sorted(
        (img for img in phi.images if not (img.is_zero or img.is_constant())),
        key=lambda f: (f.total_degree(), sorted(f.terms)),
    )
    candidates.extend(images)
    for img in images:
        shifted = img - MultiPoly.constant(
            phi.spec, phi.nvars, img.constant_term()
        )
        candidates.append(shifted)
    for img in images:
        lin = img.degree_one_part()
        if not lin.is_zero:
            candidates.append(lin)

    tried: set[MultiPoly] = set()
    for z in candidates:
        if z in tried or z.is_zero or z.is_constant():
            continue
        tried.add(z)
        if subalgebra_member(z, phi.images) is None:
            continue
        if all(
            subalgebra_member(img, (z,)) is not None for img in phi.images
        ):
            return z
    return None


@dataclass(frozen=True)
class BaseCertificate:
    """Generators plus witnesses writing every variable in them."""

    system: KroneckerSystem
    generators: tuple[MultiPoly, ...]
    witnesses: tuple[MultiPoly, ...]
    normalized: bool = False

    def validate(self) -> list[str]:
        problems = []
        n = self.system.n
        spec = self.system.spec
        for k in range(n):
            got = self.witnesses[k].substitute(self.generators)
            want = MultiPoly.variable(spec, n, k)
            if got != want:
                problems.append(f"witness for x{k + 1} does not substitute back")
        return problems


@dataclass(frozen=True)
class BaseCheck:
    is_base: bool
    generators: tuple[MultiPoly, ...]
    certificate: Optional[BaseCertificate]
    missing: tuple[int, ...]  # 1-based variables with no membership


def _diagonal_generators(
    system: KroneckerSystem, Z: Optional[Sequence[MultiPoly]]
) -> tuple[MultiPoly, ...]:
    if Z is not None:
        gens = tuple(Z)
        if len(gens) != system.n:
            raise RelationViolation(
                f"expected {system.n} generators, got {len(gens)}"
            )
        return gens
    out = []
    for i in range(1, system.n + 1):
        z = image_generator(system.entry(i, i))
        if z is None:
            raise GeneratorNotFound(
                f"no image generator found for diagonal entry ({i},{i}); "
                "supply explicit generators"
            )
        out.append(z)
    return tuple(out)


def verify_base_external(
    system: KroneckerSystem, Z: Optional[Sequence[MultiPoly]] = None
) -> BaseCheck:
    """Decide whether the diagonal generators produce the whole algebra.

    Wants verify_subbase to have passed (re-checked here).  Generators come
    from image_generator unless supplied.  The base test is subalgebra
    membership of every variable, certified by witnesses and cross-checked
    against invert_poly_map — the two must agree."""
    report = verify_subbase(system)
    if not report.ok:
        raise RelationViolation(
            "not a subbase: " + "; ".join(report.problems[:5])
        )
    gens = _diagonal_generators(system, Z)
    spec = system.spec
    n = system.n

    witnesses: list[Optional[MultiPoly]] = []
    missing: list[int] = []
    for k in range(n):
        w = subalgebra_member(MultiPoly.variable(spec, n, k), gens)
        witnesses.append(w)
        if w is None:
            missing.append(k + 1)

    invertible = invert_poly_map(gens) is not None
    if invertible != (not missing):
        raise RuntimeError(
            "membership and map inversion disagree on the base question"
        )

    if missing:
        return BaseCheck(False, gens, None, tuple(missing))
    cert = BaseCertificate(system, gens, tuple(witnesses), normalized=False)
    bad = cert.validate()
    if bad:
        raise RuntimeError("; ".join(bad))
    return BaseCheck(True, gens, cert, ())


# -- normalization -------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizationResult:
    certificate: BaseCertificate
    gammas: tuple[FieldElement, ...]  # generator values at the zero point
    scales: tuple[tuple[FieldElement, ...], ...]  # a[i][j] from e(i,j)(z_j)
    alphas: tuple[FieldElement, ...]
    global_scale: FieldElement


def _affine_parts(
    w: MultiPoly, spec: FieldSpec
) -> tuple[FieldElement, FieldElement]:
    """Split a univariate witness a*y + b; reject anything of degree > 1."""
    if w.total_degree() > 1:
        raise NonAffineImage(
            f"generator image is not affine in the target generator: {w}"
        )
    return w.coefficient((1,)), w.coefficient((0,))


def normalize_base(
    system: KroneckerSystem, cert: BaseCertificate
) -> NormalizationResult:
    """Recenter and rescale base generators until the matrix-unit action is
    literal: entry(i,j) sends z_j to z_i and all other generators to 0.

    Each entry(i,j) applied to z_j must be affine in z_i, say a_ij z_i +
    b_ij.  Consistency of the affine data (b_ij = gamma_j - a_ij gamma_i
    where gamma is the generator tuple evaluated at the common zero's point,
    and a_ij a_jk = a_ik) is verified, then z is recentered by gamma,
    rescaled per generator by a_i1, and rescaled globally so z'_1 is monic.
    The delta relations on the result are re-verified for every triple, and
    the witnesses are recomputed.
    """
    if cert.system != system:
        raise RelationViolation("certificate belongs to a different system")
    if cert.normalized:
        raise RelationViolation("certificate is already normalized")
    report = verify_subbase(system)
    if not report.ok:
        raise RelationViolation(
            "not a subbase: " + "; ".join(report.problems[:5])
        )
    spec = system.spec
    n = system.n
    zs = cert.generators

    assert report.zero is not None or n == 1
    omega = (
        report.zero.constant_part()
        if report.zero is not None
        else tuple(spec.zero() for _ in range(n))
    )
    gammas = tuple(z.evaluate(omega) for z in zs)

    a = [[spec.zero() for _ in range(n)] for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            image = system.entry(i, j).apply(zs[j - 1])
            w = subalgebra_member(image, (zs[i - 1],))
            if w is None:
                raise NonAffineImage(
                    f"entry ({i},{j}) does not map z{j} into K[z{i}]"
                )
            a_ij, b_ij = _affine_parts(w, spec)
            if a_ij.is_zero:
                raise ZeroScale(
                    f"entry ({i},{j}) collapses z{j} to a constant"
                )
            expected_b = gammas[j - 1] - a_ij * gammas[i - 1]
            if b_ij != expected_b:
                raise RelationViolation(
                    f"affine offset of entry ({i},{j}) is inconsistent with "
                    "the zero point"
                )
            a[i - 1][j - 1] = a_ij
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if a[i][j] * a[j][k] != a[i][k]:
                    raise RelationViolation(
                        f"scale cocycle fails at ({i + 1},{j + 1},{k + 1})"
                    )

    alphas = tuple(a[i][0] for i in range(n))
    primed = [
        (zs[i] - MultiPoly.constant(spec, n, gammas[i])).scale(alphas[i])
        for i in range(n)
    ]
    lam = primed[0].leading_coefficient(GREVLEX).inverse()
    final = tuple(z.scale(lam) for z in primed)

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                got = system.entry(i, j).apply(final[k - 1])
                want = (
                    final[i - 1]
                    if j == k
                    else MultiPoly.zero(spec, n)
                )
                if got != want:
                    raise RelationViolation(
                        f"normalized delta relation fails: entry ({i},{j}) "
                        f"on z'{k}"
                    )

    witnesses = []
    for k in range(n):
        w = subalgebra_member(MultiPoly.variable(spec, n, k), final)
        if w is None:
            raise RuntimeError(
                "normalized generators lost the base property"
            )
        witnesses.append(w)

    new_cert = BaseCertificate(system, final, tuple(witnesses), normalized=True)
    bad = new_cert.validate()
    if bad:
        raise RuntimeError("; ".join(bad))
    return NormalizationResult(
        certificate=new_cert,
        gammas=gammas,
        scales=tuple(tuple(row) for row in a),
        alphas=alphas,
        global_scale=lam,
    )


# -- internal base condition -----------------------------------------------------------


@dataclass(frozen=True)
class InternalBaseReport:
    ok: bool
    phi: Endomorphism
    psi: Endomorphism
    problems: tuple[str, ...]


def check_internal_base_condition(
    cert: BaseCertificate,
    other: KroneckerSystem,
    alphas: Sequence[Endomorphism],
) -> InternalBaseReport:
    """Verify the compositional base condition against a given family and
    given alphas: construct phi sending x_i to z_i and psi carrying the
    other family's diagonal generators through the certificate witnesses,
    then check alpha_i . other(i,i) = psi . system(i,i) . phi for every i.

    This is a verifier for supplied witnesses, not a search over all
    families; failure means this construction does not work here, not that
    no construction exists.
    """
    system = cert.system
    spec = system.spec
    n = system.n
    if other.n != n or other.spec != spec:
        raise RelationViolation("families must share field and size")
    if len(alphas) != n:
        raise RelationViolation(f"expected {n} alphas")
    sub_report = verify_subbase(other)
    if not sub_report.ok:
        raise RelationViolation(
            "second family is not a subbase: "
            + "; ".join(sub_report.problems[:5])
        )

    phi = Endomorphism(spec, n, cert.generators)

    ys = []
    for i in range(1, n + 1):
        y = image_generator(other.entry(i, i))
        if y is None:
            raise GeneratorNotFound(
                f"no image generator for the second family's entry ({i},{i})"
            )
        ys.append(y)
    vs = tuple(alphas[i].apply(ys[i]) for i in range(n))
    psi = Endomorphism(
        spec, n, tuple(w.substitute(vs) for w in cert.witnesses)
    )

    problems = []
    for i in range(1, n + 1):
        lhs = compose(alphas[i - 1], other.entry(i, i))
        rhs = compose(psi, compose(system.entry(i, i), phi))
        if lhs != rhs:
            problems.append(f"display fails at i={i}")
    return InternalBaseReport(not problems, phi, psi, tuple(problems))
