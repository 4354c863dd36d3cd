"""Allowed transformations under branch locality, solved exactly.

Acting on one branch imposes two families of linear conditions on a
transformation ``T`` of minimal-representation states:

* every state certain to sit in a *different* branch must be left exactly
  fixed (``T v = v``; sub-normalised closure makes these linear), and
* the branch statistics of *every* state are untouched, which - because
  the valid states span the whole space - pins the normalisation row and
  the branch-probability rows of ``T`` to the identity's rows.

Stage one solves that equality system exactly; the leftover freedom is a
linear space of directions around the identity.  Stage two intersects it
with state preservation: for polytope state spaces the image of every
vertex must satisfy every facet, which is a finite system of linear
inequalities in the free parameters, so the surviving family is itself a
polytope whose dimension exact LPs decide.  For the round state space the
family is not polyhedral; instead an explicit family of rational
orthogonal phase-plane maps is verified member by member.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exactla import (
    Mat,
    ONE,
    Vec,
    ZERO,
    dot,
    identity,
    is_zero_vec,
    mat_add,
    mat_scale,
    matmul,
    matvec,
    nullspace,
    rank,
    unit,
    vec_sub,
    zeros,
)
from .polytopes import feasible_region_dim
from .restriction import (
    RestrictionClass,
    classify_restriction,
    conditional_state_set,
)
from .simplex import LpStatus, lp_optimize
from .theories import (
    DegenerateTheoryError,
    PolytopeStateSpace,
    Rep,
    StateVec,
    TheorySpec,
    expectation_to_minimal_matrix,
    membership,
    minimal_to_expectation_matrix,
    spanning_states,
)
from .theory_io import vec_strs


@dataclass(frozen=True)
class ConstraintSystem:
    """Equality constraints on the d*d entries of a branch-local transformation."""

    theory: TheorySpec
    acting_branch: int
    fixed_vectors: Mat
    branch_row_count: int

    def equations(self) -> tuple[Mat, Vec]:
        """Flatten to ``A vec(T) = b`` with row-major unknown ordering."""
        d = self.theory.dim
        rows: list[Vec] = []
        rhs: list[Fraction] = []
        for r in range(self.branch_row_count):
            for c in range(d):
                rows.append(unit(d * d, r * d + c))
                rhs.append(ONE if r == c else ZERO)
        for v in self.fixed_vectors:
            for r in range(d):
                row = [ZERO] * (d * d)
                row[r * d : r * d + d] = list(v)
                rows.append(tuple(row))
                rhs.append(v[r])
        return tuple(rows), tuple(rhs)


@dataclass(frozen=True)
class LinearStage:
    """Solutions of the equality stage: identity plus a span of free directions."""

    base: Mat
    free_directions: tuple[Mat, ...]

    @property
    def dim(self) -> int:
        return len(self.free_directions)


@dataclass(frozen=True)
class UniqueIdentity:
    """State preservation forces every free parameter to zero."""


@dataclass(frozen=True)
class PolytopeFamily:
    """Free parameters confined to a polytope of positive dimension.

    ``halfspace_matrix . lam <= halfspace_rhs`` characterises the family
    exactly; ``witnesses`` are feasible parameter points found while
    computing the dimension (the origin, i.e. the identity, is always one).
    """

    dim: int
    halfspace_matrix: Mat
    halfspace_rhs: Vec
    witnesses: Mat


@dataclass(frozen=True)
class CandidateVerified:
    """Explicitly verified members for state spaces with no polyhedral family."""

    transforms: tuple[Mat, ...]
    reports: tuple["VerificationReport", ...]


StatePreserving = UniqueIdentity | PolytopeFamily | CandidateVerified


@dataclass(frozen=True)
class AllowedTransformSet:
    theory: TheorySpec
    branch: int
    linear_stage: LinearStage
    state_preserving: StatePreserving
    forced_fixed_count: int

    def result_kind(self) -> str:
        if isinstance(self.state_preserving, UniqueIdentity):
            return "unique_identity"
        if isinstance(self.state_preserving, PolytopeFamily):
            return "family"
        return "candidates"

    def family_dim(self) -> int | None:
        if isinstance(self.state_preserving, UniqueIdentity):
            return 0
        if isinstance(self.state_preserving, PolytopeFamily):
            return self.state_preserving.dim
        return None

    def to_jsonable(self) -> dict:
        return {
            "branch": self.branch,
            "linear_stage_dim": self.linear_stage.dim,
            "result": self.result_kind(),
            "family_dim": self.family_dim(),
            "forced_fixed_count": self.forced_fixed_count,
        }


@dataclass(frozen=True)
class VerificationReport:
    """Exact residuals and membership findings for one candidate transformation."""

    branch: int
    branch_row_residuals: Mat
    fixed_vector_residuals: Mat
    membership_violations: tuple[tuple[Vec, Vec, str], ...]
    method: str
    exhaustive: bool

    @property
    def residuals_zero(self) -> bool:
        return all(
            is_zero_vec(r)
            for r in self.branch_row_residuals + self.fixed_vector_residuals
        )

    @property
    def passed(self) -> bool:
        return self.residuals_zero and not self.membership_violations

    def to_jsonable(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "residuals_zero": self.residuals_zero,
            "membership_violations": [
                {"probe": vec_strs(p), "image": vec_strs(i), "violation": why}
                for p, i, why in self.membership_violations
            ],
            "method": self.method,
            "exhaustive": self.exhaustive,
        }


class StatePreservationNotApplicableError(ValueError):
    """Raised when the facet-based stage is asked about a non-polyhedral space."""


# -- stage one: the equality system -----------------------------------------------


def assemble_constraints(t: TheorySpec, branch: int) -> ConstraintSystem:
    """Fixed vectors of all other branches plus the pinned branch-statistics rows."""
    if not 0 <= branch < t.branch_outcomes:
        raise ValueError(
            f"branch {branch} out of range for {t.branch_outcomes} outcomes"
        )
    if rank(spanning_states(t)) != t.dim:
        raise DegenerateTheoryError(
            "the valid states do not span the state space; branch-statistics "
            "preservation cannot be promoted to row constraints"
        )
    fixed: list[Vec] = []
    for other in range(t.branch_outcomes):
        if other != branch:
            fixed.extend(conditional_state_set(t, other).generators)
    return ConstraintSystem(
        theory=t,
        acting_branch=branch,
        fixed_vectors=tuple(fixed),
        branch_row_count=t.branch_outcomes,
    )


def _unflatten(flat: Vec, d: int) -> Mat:
    return tuple(flat[r * d : (r + 1) * d] for r in range(d))


def solve_linear_stage(cs: ConstraintSystem) -> LinearStage:
    """Exact solution set of the equalities: always the identity plus a kernel."""
    a, b = cs.equations()
    d = cs.theory.dim
    flat_identity = tuple(x for row in identity(d) for x in row)
    if matvec(a, flat_identity) != b:  # pragma: no cover - identity always satisfies
        raise AssertionError("the identity violates the assembled constraints")
    kernel = nullspace(a)
    return LinearStage(
        base=identity(d),
        free_directions=tuple(_unflatten(v, d) for v in kernel),
    )


# -- stage two: state preservation --------------------------------------------------


def family_member(stage: LinearStage, point: Vec) -> Mat:
    """Instantiate ``base + sum(point_k * direction_k)``."""
    if len(point) != stage.dim:
        raise ValueError(f"expected {stage.dim} parameters, got {len(point)}")
    result = stage.base
    for lam, direction in zip(point, stage.free_directions):
        if lam != 0:
            result = mat_add(result, mat_scale(direction, lam))
    return result


def impose_state_preservation(
    t: TheorySpec, stage: LinearStage
) -> UniqueIdentity | PolytopeFamily:
    """Cut the free directions down to those mapping the polytope into itself.

    Each (vertex, facet) pair contributes one inequality that is linear in
    the free parameters; by convexity the vertices decide membership for
    every state.  Exact LPs then either pin every parameter to zero or
    measure the affine dimension of the surviving parameter polytope.
    """
    space = t.state_space
    if not isinstance(space, PolytopeStateSpace):
        raise StatePreservationNotApplicableError(
            "state preservation as linear inequalities needs facets; "
            "verify explicit candidates instead"
        )
    k = stage.dim
    if k == 0:
        return UniqueIdentity()
    seen: set[tuple[Vec, Fraction]] = set()
    rows: list[Vec] = []
    rhs: list[Fraction] = []
    for v in space.vertices:
        base_image = matvec(stage.base, v)
        for g in space.cone_facets:
            coeffs = tuple(
                dot(g, matvec(direction, v)) for direction in stage.free_directions
            )
            bound = -dot(g, base_image)
            if all(c == 0 for c in coeffs):
                if bound < 0:  # pragma: no cover - base image is always a member
                    raise AssertionError("identity image violates a facet")
                continue
            key = (coeffs, bound)
            if key not in seen:
                seen.add(key)
                rows.append(coeffs)
                rhs.append(bound)
    a = tuple(rows)
    b = tuple(rhs)
    witnesses: list[Vec] = [zeros(k)]
    forced_zero = True
    for axis_index in range(k):
        axis = unit(k, axis_index)
        for sense in ("max", "min"):
            result = lp_optimize(axis, ineq=(a, b), sense=sense)
            if result.status is not LpStatus.OPTIMAL:  # pragma: no cover
                raise AssertionError("the parameter polytope is bounded by construction")
            if result.optimum != 0:
                forced_zero = False
            if result.witness is not None and result.witness not in witnesses:
                witnesses.append(result.witness)
    if forced_zero:
        return UniqueIdentity()
    return PolytopeFamily(
        dim=feasible_region_dim(a, b, k),
        halfspace_matrix=a,
        halfspace_rhs=b,
        witnesses=tuple(witnesses),
    )


def sample_family_points(
    family: PolytopeFamily, count: int, seed: int = 0
) -> list[Vec]:
    """Rational parameter points inside the family: mixtures of LP witnesses."""
    rng = random.Random(seed)
    pool = family.witnesses
    points = []
    for _ in range(count):
        weights = [Fraction(rng.randint(0, 9)) for _ in pool]
        if sum(weights) == 0:
            weights[0] = Fraction(1)
        total = sum(weights)
        points.append(
            tuple(
                sum((w * p[i] for w, p in zip(weights, pool)), ZERO) / total
                for i in range(len(pool[0]))
            )
        )
    return points


# -- explicit candidates for the round state space -----------------------------------


def _embed_phase_block(t: TheorySpec, block: Mat) -> Mat:
    """Lift a 2x2 map of the two non-branch expectation axes to minimal coordinates."""
    d = t.dim
    t_exp = [list(row) for row in identity(d)]
    for i in range(2):
        for j in range(2):
            t_exp[2 + i][2 + j] = block[i][j]
    to_min = expectation_to_minimal_matrix(t)
    to_exp = minimal_to_expectation_matrix(t)
    return matmul(to_min, matmul(tuple(tuple(r) for r in t_exp), to_exp))


def ball_candidate_transforms(t: TheorySpec) -> tuple[Mat, ...]:
    """Exact rational rotations and a reflection of the free expectation plane."""
    cos, sin = Fraction(3, 5), Fraction(4, 5)
    blocks = [
        ((ONE, ZERO), (ZERO, ONE)),
        ((cos, -sin), (sin, cos)),
        ((cos, sin), (-sin, cos)),
        ((ONE, ZERO), (ZERO, -ONE)),
        ((cos, sin), (sin, -cos)),
    ]
    return tuple(_embed_phase_block(t, block) for block in blocks)


_PYTHAGOREAN_PAIRS = (
    (Fraction(3, 5), Fraction(4, 5)),
    (Fraction(4, 5), Fraction(3, 5)),
    (Fraction(5, 13), Fraction(12, 13)),
    (Fraction(8, 17), Fraction(15, 17)),
)

_RATIONAL_TRIPLES = (
    (Fraction(1, 3), Fraction(2, 3), Fraction(2, 3)),
    (Fraction(2, 7), Fraction(3, 7), Fraction(6, 7)),
    (Fraction(3, 13), Fraction(4, 13), Fraction(12, 13)),
)


def _ball_probe_states(t: TheorySpec) -> list[Vec]:
    """Deterministic rational sphere points plus a few interior states."""
    points: list[tuple[Fraction, Fraction, Fraction]] = []
    for axis in range(3):
        for sign in (ONE, -ONE):
            p = [ZERO, ZERO, ZERO]
            p[axis] = sign
            points.append(tuple(p))
    for c, s in _PYTHAGOREAN_PAIRS:
        for i, j in ((0, 1), (0, 2), (1, 2)):
            for si in (ONE, -ONE):
                for sj in (ONE, -ONE):
                    p = [ZERO, ZERO, ZERO]
                    p[i] = si * c
                    p[j] = sj * s
                    points.append(tuple(p))
    for triple in _RATIONAL_TRIPLES:
        points.append(triple)
        points.append((-triple[0], triple[1], -triple[2]))
    points.append((ZERO, ZERO, ZERO))
    to_min = expectation_to_minimal_matrix(t)
    states = [matvec(to_min, (ONE,) + p) for p in points]
    half = Fraction(1, 2)
    states.extend(
        tuple(half * x for x in matvec(to_min, (ONE,) + p)) for p in points[:12]
    )
    return states


# -- verification ---------------------------------------------------------------------


def verify_transformation(t: TheorySpec, transform: Mat, branch: int) -> VerificationReport:
    """Exact check of one candidate: residuals first, then state preservation."""
    d = t.dim
    if len(transform) != d or any(len(row) != d for row in transform):
        raise ValueError(f"transformation must be {d}x{d} for this theory")
    cs = assemble_constraints(t, branch)
    ident = identity(d)
    branch_residuals = tuple(
        vec_sub(transform[r], ident[r]) for r in range(cs.branch_row_count)
    )
    fixed_residuals = tuple(
        vec_sub(matvec(transform, v), v) for v in cs.fixed_vectors
    )
    space = t.state_space
    violations: list[tuple[Vec, Vec, str]] = []
    if isinstance(space, PolytopeStateSpace):
        method = "vertex-images"
        exhaustive = True
        for v in space.vertices:
            image = matvec(transform, v)
            result = membership(t, StateVec(Rep.MINIMAL, image, t))
            if not result.is_inside:
                violations.append((v, image, result.violation or "outside"))
    else:
        to_exp = minimal_to_expectation_matrix(t)
        to_min = expectation_to_minimal_matrix(t)
        t_exp = matmul(to_exp, matmul(transform, to_min))
        rows_pinned = all(is_zero_vec(r) for r in branch_residuals)
        coupling_zero = all(t_exp[r][c] == 0 for r in (2, 3) for c in (0, 1))
        block = ((t_exp[2][2], t_exp[2][3]), (t_exp[3][2], t_exp[3][3]))
        gram = matmul(
            ((block[0][0], block[1][0]), (block[0][1], block[1][1])), block
        )
        if rows_pinned and coupling_zero and gram == identity(2):
            method = "orthogonal-block"
            exhaustive = True
        else:
            method = "probe-set"
            exhaustive = False
            for probe in _ball_probe_states(t):
                image = matvec(transform, probe)
                result = membership(t, StateVec(Rep.MINIMAL, image, t))
                if not result.is_inside:
                    violations.append((probe, image, result.violation or "outside"))
    return VerificationReport(
        branch=branch,
        branch_row_residuals=branch_residuals,
        fixed_vector_residuals=fixed_residuals,
        membership_violations=tuple(violations),
        method=method,
        exhaustive=exhaustive,
    )


# -- the full pipeline -----------------------------------------------------------------


def count_forced_eigenvectors(t: TheorySpec, branch: int) -> int:
    """Independent states every branch-local transformation must leave fixed.

    The fixed vectors of the other branches contribute their rank; one more
    always comes from the acting branch itself (its unique certain state
    when the theory is conditionally restricted there, an exact stochastic
    fixed point when the branch statistics leave a whole face free), and it
    is independent because every other-branch fixed vector assigns the
    acting branch probability zero.
    """
    cs = assemble_constraints(t, branch)
    acting = conditional_state_set(t, branch).generators[0]
    return rank(cs.fixed_vectors + (acting,))


def allowed_transform_set(t: TheorySpec, branch: int) -> AllowedTransformSet:
    """Run both stages and package the answer for one acting branch."""
    cs = assemble_constraints(t, branch)
    stage = solve_linear_stage(cs)
    space = t.state_space
    preserving: StatePreserving
    if isinstance(space, PolytopeStateSpace):
        preserving = impose_state_preservation(t, stage)
    else:
        transforms = ball_candidate_transforms(t)
        reports = tuple(
            verify_transformation(t, transform, branch) for transform in transforms
        )
        if not all(r.passed for r in reports):  # pragma: no cover - all orthogonal
            raise AssertionError("a built-in candidate failed verification")
        preserving = CandidateVerified(transforms=transforms, reports=reports)
    return AllowedTransformSet(
        theory=t,
        branch=branch,
        linear_stage=stage,
        state_preserving=preserving,
        forced_fixed_count=count_forced_eigenvectors(t, branch),
    )


def allowed_set_dimension(ats: AllowedTransformSet) -> int | None:
    """Dimension of the allowed family when finitely characterised, else None."""
    return ats.family_dim()


# -- top-level theorem checks ------------------------------------------------------------


@dataclass(frozen=True)
class TheoremAssertion:
    name: str
    passed: bool
    detail: str

    def to_jsonable(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class TheoremReport:
    theory_name: str
    restriction_class: RestrictionClass
    per_branch_freedom: tuple[int, ...]
    branch_results: tuple[AllowedTransformSet, ...]
    assertions: tuple[TheoremAssertion, ...]
    summary: str

    @property
    def ok(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_jsonable(self) -> dict:
        return {
            "theory": self.theory_name,
            "class": self.restriction_class.value,
            "per_branch_freedom": {
                str(b): f for b, f in enumerate(self.per_branch_freedom)
            },
            "branches": [r.to_jsonable() for r in self.branch_results],
            "assertions": [a.to_jsonable() for a in self.assertions],
            "summary": self.summary,
            "ok": self.ok,
        }


def verify_main_theorem(t: TheorySpec, theory_name: str = "theory") -> TheoremReport:
    """Check the freeze/freedom dichotomy on one theory, branch by branch.

    Fully independent theories must come out frozen (the identity is the
    only allowed transformation and the forced fixed states already span
    everything); fully conditionally restricted theories with any leftover
    degrees of freedom must keep a strictly larger allowed set.
    """
    report = classify_restriction(t)
    results = tuple(
        allowed_transform_set(t, b) for b in range(t.branch_outcomes)
    )
    assertions: list[TheoremAssertion] = []
    cls = report.restriction_class
    d = t.dim
    n = t.branch_outcomes
    if cls is RestrictionClass.FULLY_INDEPENDENT:
        for ats in results:
            assertions.append(
                TheoremAssertion(
                    name=f"branch {ats.branch} frozen",
                    passed=isinstance(ats.state_preserving, UniqueIdentity),
                    detail=f"allowed set is {ats.result_kind()}",
                )
            )
            assertions.append(
                TheoremAssertion(
                    name=f"branch {ats.branch} forced fixed count = d",
                    passed=ats.forced_fixed_count == d,
                    detail=f"{ats.forced_fixed_count} of {d}",
                )
            )
    elif cls is RestrictionClass.FULLY_CONDITIONALLY_RESTRICTED:
        for ats in results:
            assertions.append(
                TheoremAssertion(
                    name=f"branch {ats.branch} forced fixed count = N",
                    passed=ats.forced_fixed_count == n,
                    detail=f"{ats.forced_fixed_count} of N = {n}",
                )
            )
            if t.extra_freedoms > 0:
                if isinstance(ats.state_preserving, CandidateVerified):
                    nontrivial = any(
                        transform != identity(d)
                        for transform in ats.state_preserving.transforms
                    )
                    detail = (
                        f"{len(ats.state_preserving.transforms)} verified candidates"
                    )
                else:
                    dim = ats.family_dim()
                    nontrivial = dim is not None and dim > 0
                    detail = f"family dimension {dim}"
                assertions.append(
                    TheoremAssertion(
                        name=f"branch {ats.branch} keeps non-classical dynamics",
                        passed=nontrivial,
                        detail=detail,
                    )
                )
    else:
        for ats in results:
            assertions.append(
                TheoremAssertion(
                    name=f"branch {ats.branch} forced fixed count within [N, d]",
                    passed=n <= ats.forced_fixed_count <= d,
                    detail=f"{ats.forced_fixed_count} in [{n}, {d}]",
                )
            )
    frozen = all(
        isinstance(ats.state_preserving, UniqueIdentity) for ats in results
    )
    if not all(a.passed for a in assertions):
        summary = "THEOREM VIOLATION: see failed assertions"
    elif frozen:
        summary = "frozen: unique identity on every branch"
    elif cls is RestrictionClass.FULLY_CONDITIONALLY_RESTRICTED:
        summary = "non-classical dynamics present"
    else:
        summary = "partial freedom: allowed set larger than the identity"
    return TheoremReport(
        theory_name=theory_name,
        restriction_class=cls,
        per_branch_freedom=report.per_branch_freedom,
        branch_results=results,
        assertions=tuple(assertions),
        summary=summary,
    )


@dataclass(frozen=True)
class TradeoffReport:
    """More conditional restriction must buy at least as much dynamics."""

    restricted_name: str
    restricted_freedoms: tuple[int, ...]
    restricted_dims: tuple[int, ...]
    freer_name: str
    freer_freedoms: tuple[int, ...]
    freer_dims: tuple[int, ...]
    consistent: bool

    def to_jsonable(self) -> dict:
        return {
            "restricted": {
                "theory": self.restricted_name,
                "per_branch_freedom": list(self.restricted_freedoms),
                "allowed_set_dim": list(self.restricted_dims),
            },
            "freer": {
                "theory": self.freer_name,
                "per_branch_freedom": list(self.freer_freedoms),
                "allowed_set_dim": list(self.freer_dims),
            },
            "consistent": self.consistent,
        }


def restriction_dynamics_tradeoff(
    restricted: TheorySpec,
    freer: TheorySpec,
    restricted_name: str = "restricted",
    freer_name: str = "freer",
) -> TradeoffReport:
    """Compare two polytope theories branch by branch.

    ``restricted`` must have componentwise smaller conditional freedoms; the
    report is consistent when its allowed-set dimensions are componentwise
    at least as large, strictly larger wherever the freedom dropped.
    """
    fr = classify_restriction(restricted).per_branch_freedom
    ff = classify_restriction(freer).per_branch_freedom
    if len(fr) != len(ff):
        raise ValueError("theories must share the branch outcome count")
    if any(a > b for a, b in zip(fr, ff)):
        raise ValueError(
            f"{restricted_name} is not componentwise more restricted than {freer_name}"
        )
    dims_restricted = []
    dims_freer = []
    for b in range(len(fr)):
        dim_r = allowed_set_dimension(allowed_transform_set(restricted, b))
        dim_f = allowed_set_dimension(allowed_transform_set(freer, b))
        if dim_r is None or dim_f is None:
            raise ValueError("the trade-off comparison needs polytope state spaces")
        dims_restricted.append(dim_r)
        dims_freer.append(dim_f)
    consistent = all(
        dr >= df and (fr[b] == ff[b] or dr > df)
        for b, (dr, df) in enumerate(zip(dims_restricted, dims_freer))
    )
    return TradeoffReport(
        restricted_name=restricted_name,
        restricted_freedoms=fr,
        restricted_dims=tuple(dims_restricted),
        freer_name=freer_name,
        freer_freedoms=ff,
        freer_dims=tuple(dims_freer),
        consistent=consistent,
    )
