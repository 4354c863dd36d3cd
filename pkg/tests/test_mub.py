"""Mutual unbiasedness via permuted statistics."""

from fractions import Fraction
import random

import pytest

from gptdyn.exactla import vec
from gptdyn.mub import (
    OutcomePermutation,
    is_mutually_unbiased,
    permute_measurement_stats,
    qubit_axis_unbiased,
)
from gptdyn.restriction import RestrictionClass, classify_restriction
from gptdyn.theories import (
    MeasurementSpec,
    Role,
    TheorySpec,
    make_boxworld,
    make_gbit,
    make_octahedron,
    make_qubit,
    membership,
    polytope_from_vertices,
    to_expectation,
)

SWAP = (1, 0)


def test_identity_permutation_is_noop():
    t = make_gbit()
    s = t.minimal_state([1, "1/3", "2/3"])
    image = permute_measurement_stats(s, OutcomePermutation("X", (0, 1)))
    assert image.entries == s.entries


def test_gbit_corner_branch_swap():
    t = make_gbit()
    corner = t.minimal_state([1, 1, 1])
    swapped = permute_measurement_stats(corner, OutcomePermutation("Z", SWAP))
    assert swapped.entries == vec([1, 0, 1])
    # In the expectation picture that is the reflection (1, 1, 1) -> (1, -1, 1).
    assert to_expectation(swapped).entries == vec([1, -1, 1])


def test_qubit_branch_swap_flips_sign():
    t = make_qubit()
    up = t.minimal_state([1, 1, "1/2", "1/2"])
    swapped = permute_measurement_stats(up, OutcomePermutation("Z", SWAP))
    assert to_expectation(swapped).entries == vec([1, -1, 0, 0])


def test_permutation_preserves_other_entries_and_n():
    rng = random.Random(31)
    t = make_boxworld(2, 3)
    for _ in range(25):
        entries = [Fraction(1)] + [
            Fraction(rng.randint(0, 3), 6) for _ in range(t.dim - 1)
        ]
        s = t.minimal_state(entries)
        perm = OutcomePermutation("X", (2, 0, 1))
        image = permute_measurement_stats(s, perm)
        assert image.entries[0] == s.entries[0]
        assert t.full_probabilities(image.entries, "Z") == t.full_probabilities(
            s.entries, "Z"
        )
        assert sorted(t.full_probabilities(image.entries, "X")) == sorted(
            t.full_probabilities(s.entries, "X")
        )


def test_permutation_involution_on_random_states():
    rng = random.Random(13)
    t = make_boxworld(2, 3)
    perm = OutcomePermutation("X", (1, 2, 0))
    inverse = perm.inverse()
    for _ in range(50):
        entries = [Fraction(1)] + [
            Fraction(rng.randint(0, 4), 8) for _ in range(t.dim - 1)
        ]
        s = t.minimal_state(entries)
        roundtrip = permute_measurement_stats(
            permute_measurement_stats(s, perm), inverse
        )
        assert roundtrip.entries == s.entries


def test_permutation_validation():
    with pytest.raises(ValueError):
        OutcomePermutation("X", (0, 0))
    t = make_gbit()
    s = t.minimal_state([1, 0, 0])
    with pytest.raises(ValueError):
        permute_measurement_stats(s, OutcomePermutation("Q", SWAP))
    with pytest.raises(ValueError):
        permute_measurement_stats(s, OutcomePermutation("X", (0, 1, 2)))


def test_gbit_is_mutually_unbiased():
    report = is_mutually_unbiased(make_gbit(), ["X", "Z"])
    assert report.mutually_unbiased
    assert report.counterexample is None


def test_qubit_is_mutually_unbiased():
    assert is_mutually_unbiased(make_qubit(), ["X", "Y", "Z"]).mutually_unbiased


def test_octahedron_is_mutually_unbiased():
    # Oracle: all 4 vertices times both outcome swaps, checked by hand -
    # each swap reflects one expectation axis and the diamond is symmetric.
    t = make_octahedron()
    for v in t.state_space.vertices:
        for label in ("Z", "X"):
            image = permute_measurement_stats(
                t.minimal_state(v), OutcomePermutation(label, SWAP)
            )
            assert membership(t, image).is_inside
    assert is_mutually_unbiased(t, ["X", "Z"]).mutually_unbiased


def test_asymmetric_triangle_is_not_unbiased():
    # Hull of (z, x) in {(1,1), (0,0), (1,0)}: swapping X at the corner
    # (0, 0) would need (0, 1), which lies outside the triangle.
    triangle = TheorySpec(
        measurements=(
            MeasurementSpec("Z", 2, Role.BRANCH),
            MeasurementSpec("X", 2, Role.FIDUCIAL),
        ),
        state_space=polytope_from_vertices(
            (vec([1, 1, 1]), vec([1, 0, 0]), vec([1, 1, 0]))
        ),
    )
    report = is_mutually_unbiased(triangle, ["Z", "X"])
    assert not report.mutually_unbiased
    assert report.counterexample is not None
    state, perm = report.counterexample
    image = permute_measurement_stats(triangle.minimal_state(state), perm)
    assert not membership(triangle, image).is_inside


def test_singleton_set_rejected():
    with pytest.raises(ValueError):
        is_mutually_unbiased(make_gbit(), ["Z"])


def test_vertex_sufficiency_extends_to_mixtures():
    rng = random.Random(8)
    for t in (make_gbit(), make_octahedron()):
        labels = ["Z", "X"]
        assert is_mutually_unbiased(t, labels).mutually_unbiased
        vertices = t.state_space.vertices
        for _ in range(30):
            weights = [Fraction(rng.randint(0, 5)) for _ in vertices]
            if sum(weights) == 0:
                weights[0] = Fraction(1)
            total = sum(weights)
            mix = tuple(
                sum((w * v[i] for w, v in zip(weights, vertices)), Fraction(0)) / total
                for i in range(t.dim)
            )
            for label in labels:
                image = permute_measurement_stats(
                    t.minimal_state(mix), OutcomePermutation(label, SWAP)
                )
                assert membership(t, image).is_inside


def test_gbit_unbiased_yet_fully_independent():
    t = make_gbit()
    assert is_mutually_unbiased(t, ["X", "Z"]).mutually_unbiased
    assert (
        classify_restriction(t).restriction_class
        is RestrictionClass.FULLY_INDEPENDENT
    )


def test_ball_agrees_with_axis_orthogonality():
    assert is_mutually_unbiased(make_qubit(), ["Z", "X", "Y"]).mutually_unbiased
    x_axis, y_axis, z_axis = vec([1, 0, 0]), vec([0, 1, 0]), vec([0, 0, 1])
    assert qubit_axis_unbiased(x_axis, y_axis)
    assert qubit_axis_unbiased(x_axis, z_axis)
    assert qubit_axis_unbiased(y_axis, z_axis)


def test_axis_orthogonality_cases():
    assert qubit_axis_unbiased(vec([1, 0, 0]), vec([0, 0, 1]))
    assert not qubit_axis_unbiased(vec([1, 0, 0]), vec([1, 0, 0]))
    # Exact dot product: (3/5)(-4/5) + (4/5)(3/5) = 0.
    assert qubit_axis_unbiased(vec(["3/5", "4/5", 0]), vec(["-4/5", "3/5", 0]))
    with pytest.raises(ValueError):
        qubit_axis_unbiased(vec([0, 0, 0]), vec([1, 0, 0]))
    with pytest.raises(ValueError):
        qubit_axis_unbiased(vec([1, 0]), vec([1, 0, 0]))


def test_mub_report_jsonable():
    report = is_mutually_unbiased(make_gbit(), ["X", "Z"])
    assert report.to_jsonable() == {
        "verdict": "mutually_unbiased",
        "counterexample": None,
    }
