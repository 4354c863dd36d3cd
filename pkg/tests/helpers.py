"""Shared test utilities: random exact states and mixtures."""

from fractions import Fraction
import random

from gptdyn.theories import TheorySpec, spanning_states


def rational_mixture(rows, weights):
    total = sum(weights)
    width = len(rows[0])
    return tuple(
        sum((w * r[i] for w, r in zip(weights, rows)), Fraction(0)) / total
        for i in range(width)
    )


def random_member_state(theory: TheorySpec, rng: random.Random, subnormal: bool = True):
    """Random rational mixture of spanning members, optionally scaled down."""
    base = spanning_states(theory)
    weights = [Fraction(rng.randint(0, 8)) for _ in base]
    if sum(weights) == 0:
        weights[0] = Fraction(1)
    entries = rational_mixture(base, weights)
    if subnormal:
        scale = Fraction(rng.randint(1, 6), 6)
        entries = tuple(scale * x for x in entries)
    return theory.minimal_state(entries)
