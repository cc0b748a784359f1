"""Random exact jets for property tests and the ``verify`` command."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from . import linalg
from .jet_algebra import ScalarJet, monomials, monomials_upto
from .jet_groups import (
    ConnectionJet,
    DiffeoJet,
    MetricJet,
    PoissonJet,
    UnipotentFactors,
    diffeo_compose,
    eta_assemble,
)


def rational(rng: random.Random, span: int = 3, denominators=(1, 1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice(denominators))


def scalar_jet(rng, dim, order, density=0.6, span=3) -> ScalarJet:
    coeffs = {m: rational(rng, span) for m in monomials_upto(dim, order) if rng.random() < density}
    return ScalarJet(dim, order, coeffs)


def homogeneous_map(rng, dim, degree, density=0.5, span=2):
    return tuple(
        ScalarJet(dim, degree, {m: rational(rng, span) for m in monomials(dim, degree) if rng.random() < density})
        for _ in range(dim)
    )


def unipotent_factors(rng, dim, order, density=0.5, span=2) -> UnipotentFactors:
    return UnipotentFactors(dim, [homogeneous_map(rng, dim, d, density, span) for d in range(2, order + 1)])


def unipotent(rng, dim, order, density=0.5, span=2) -> DiffeoJet:
    return eta_assemble(unipotent_factors(rng, dim, order, density, span))


def invertible_matrix(rng, dim, span=2):
    while True:
        mat = [[Fraction(rng.randint(-span, span)) for _ in range(dim)] for _ in range(dim)]
        if linalg.det(mat) != 0:
            return mat


def diffeo(rng, dim, order, density=0.5, span=2) -> DiffeoJet:
    lin = DiffeoJet.linear(invertible_matrix(rng, dim), order)
    return diffeo_compose(lin, unipotent(rng, dim, order, density, span)) if order > 1 else lin


def metric_jet(rng, dim, order, density=0.5, span=2) -> MetricJet:
    """Random metric jet with nondegenerate (possibly indefinite) ``h_0``."""
    while True:
        comps = {}
        for i in range(dim):
            for j in range(i, dim):
                c = {m: rational(rng, span) for m in monomials_upto(dim, order) if rng.random() < density}
                if i == j and rng.random() < 0.8:
                    c[(0,) * dim] = Fraction(rng.choice([1, 1, 2, 3, -1]))
                comps[(i, j)] = c
                if i != j:
                    comps[(j, i)] = c
        h = MetricJet(dim, order, comps)
        if h.is_nondegenerate():
            return h


def connection_jet(rng, dim, order, density=0.4, span=2) -> ConnectionJet:
    comps = {}
    for idx in product(range(dim), repeat=3):
        c = {m: rational(rng, span) for m in monomials_upto(dim, order) if rng.random() < density}
        if c:
            comps[idx] = c
    return ConnectionJet(dim, order, comps)


def symmetric_connection_jet(rng, dim, order, density=0.4, span=2) -> ConnectionJet:
    return connection_jet(rng, dim, order, density, span).symmetric_part()


def constant_poisson(rng, dim, order=0, span=2) -> PoissonJet:
    mat = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            v = rational(rng, span)
            mat[i][j], mat[j][i] = v, -v
    return PoissonJet.constant(mat, order)
