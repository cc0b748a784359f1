"""Randomized invariant suites, shared by the ``verify`` command and the tests.

Each suite draws random exact jets from a seeded generator and checks one
family of identities.  A case that raises :class:`InvariantViolation`
counts separately from an ordinary failed check.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

from . import linalg
from . import random_jets as rj
from .connection_normalizer import adapted_chart, normalize_connection, normalize_connection_checked, torsion
from .equivariant_maps import kernel_dimension, kernel_membership
from .errors import BackendIncompleteError, InvariantViolation
from .jet_algebra import ScalarJet, jet_partial
from .jet_groups import (
    ConnectionJet,
    MetricJet,
    PoissonJet,
    act_on_connection_jet,
    act_on_scalar_jet,
    act_on_tensor_jet,
    diffeo_invert,
)
from .metric_normalizer import normalize_metric
from .natural_ops import laplacian_at_point
from .quantization import associativity_check, canonical_star_at_point, moyal_star, poisson_bracket


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    passed: int = 0
    failed: int = 0
    invariant_violations: int = 0
    backend_incomplete: int = 0

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.invariant_violations == 0

    def as_dict(self) -> dict:
        return asdict(self)


# -- individual checks: each returns True when the identity holds ----------


def metric_uniqueness_case(rng: random.Random) -> bool:
    m, k = rng.choice((1, 2, 3)), rng.choice((1, 2, 3))
    h = rj.metric_jet(rng, m, k)
    n = rj.unipotent(rng, m, k + 1)
    a, b = normalize_metric(h), normalize_metric(act_on_tensor_jet(n, h))
    same = a.h0 == b.h0 and a.invariants == b.invariants
    in_kernel = all(kernel_membership(x, "L", i) for i, x in enumerate(b.invariants, start=2))
    return same and in_kernel and all(a.certify(h).values())


def connection_uniqueness_case(rng: random.Random) -> bool:
    m, k = rng.choice((1, 2, 3)), rng.choice((0, 1, 2))
    theta = rj.connection_jet(rng, m, k)
    n = rj.unipotent(rng, m, k + 2)
    # the checked variant raises if the closed form and the probing solver disagree
    a = normalize_connection_checked(theta)
    b = normalize_connection_checked(act_on_connection_jet(n, theta))
    in_kernel = all(kernel_membership(x, "C", i) for i, x in enumerate(b.invariants))
    return a.invariants == b.invariants and in_kernel and all(a.certify(theta).values())


def torsion_case(rng: random.Random) -> bool:
    m = rng.choice((1, 2, 3))
    theta = rj.connection_jet(rng, m, rng.choice((0, 1, 2)))
    sym = theta.symmetric_part()
    return (
        torsion(theta) == theta.truncate(0).antisymmetric_part()
        and torsion(sym).is_zero()
    )


def flat_case(rng: random.Random) -> bool:
    m, k = rng.choice((1, 2, 3)), rng.choice((0, 1, 2, 3))
    h = MetricJet.from_matrix([[int(i == j) for j in range(m)] for i in range(m)], k)
    nf = normalize_metric(h)
    cf = normalize_connection(ConnectionJet.zero(m, k))
    return (
        nf.normalizer.is_identity()
        and all(a.is_zero() for a in nf.invariants)
        and cf.normalizer.is_identity()
        and all(p.is_zero() for p in cf.invariants)
    )


def laplace_beltrami(h: MetricJet, v: ScalarJet) -> Fraction:
    """``g^{ij} (d_i d_j v - Gamma^k_ij d_k v)`` at the origin, straight from the coordinate formula."""
    m = h.dim
    ginv = linalg.inverse(h.h0)
    dg = [[[jet_partial(h.component((i, j)), l).constant_term for l in range(m)] for j in range(m)] for i in range(m)]
    # Christoffel symbols of the first kind, then raised
    first = [[[(dg[j][l][i] + dg[i][l][j] - dg[i][j][l]) / 2 for l in range(m)] for j in range(m)] for i in range(m)]
    gamma = [[[sum(ginv[k][l] * first[i][j][l] for l in range(m)) for k in range(m)] for j in range(m)] for i in range(m)]
    dv = [jet_partial(v, k).constant_term for k in range(m)]
    hess = [[jet_partial(jet_partial(v, i), j).constant_term for j in range(m)] for i in range(m)]
    return sum(
        (ginv[i][j] * (hess[i][j] - sum(gamma[i][j][k] * dv[k] for k in range(m))) for i in range(m) for j in range(m)),
        Fraction(0),
    )


def laplacian_case(rng: random.Random) -> bool:
    m = rng.choice((1, 2, 3))
    h = rj.metric_jet(rng, m, 2)
    v = rj.scalar_jet(rng, m, 2)
    return laplacian_at_point(h, v) == laplace_beltrami(h, v)


def one_dimensional_case(rng: random.Random) -> bool:
    k = rng.choice((1, 2, 3, 4))
    ranks_ok = all(kernel_dimension("L", 1, n) == 0 for n in range(1, k + 1)) and all(
        kernel_dimension("C", 1, n) == 0 for n in range(k + 1)
    )
    nf = normalize_metric(rj.metric_jet(rng, 1, k))
    cf = normalize_connection(rj.connection_jet(rng, 1, k, density=0.8))
    return ranks_ok and all(a.is_zero() for a in nf.invariants) and all(p.is_zero() for p in cf.invariants)


CANONICAL = [[0, 1], [-1, 0]]


def moyal_case(rng: random.Random) -> bool:
    f, g, h = (rj.scalar_jet(rng, 2, 3) for _ in range(3))
    N = 3
    assoc = associativity_check(CANONICAL, f, g, h, N)
    fg, gf = moyal_star(CANONICAL, f, g, N), moyal_star(CANONICAL, g, f, N)
    skew = fg[1] - gf[1] == poisson_bracket(CANONICAL, f, g).truncate(fg[1].order)
    zero = [[0, 0], [0, 0]]
    commutative = moyal_star(zero, f, g, N)
    flat = commutative[0] == f * g and all(c.is_zero() for c in commutative.coefficients[1:])
    return assoc and skew and flat


def adapted_poisson(theta: ConnectionJet, mat, N: int) -> PoissonJet:
    """A Poisson jet that becomes the constant ``mat`` in the adapted chart of ``theta``."""
    order = 0 if N <= 1 else 2 * N - 2
    depth = max(0, N - 1, order - 1)
    chart = adapted_chart(theta, depth).truncate(order + 1)
    return act_on_tensor_jet(diffeo_invert(chart), PoissonJet.constant(mat, order))


def naturality_case(rng: random.Random) -> bool:
    m, N = rng.choice((2, 3)), rng.choice((1, 2))
    depth = max(0, N - 1, 2 * N - 3)
    theta = rj.connection_jet(rng, m, depth)
    omega = adapted_poisson(theta, rj.constant_poisson(rng, m).matrix_at_zero(), N)
    f, g = rj.scalar_jet(rng, m, N), rj.scalar_jet(rng, m, N)
    u = rj.unipotent(rng, m, depth + 2)
    before = canonical_star_at_point(theta, omega, f, g, N)
    after = canonical_star_at_point(
        act_on_connection_jet(u, theta),
        act_on_tensor_jet(u.truncate(omega.order + 1), omega),
        act_on_scalar_jet(u.truncate(N + 1), f),
        act_on_scalar_jet(u.truncate(N + 1), g),
        N,
    )
    return before == after


SUITES: dict[str, Callable[[random.Random], bool]] = {
    "metric-uniqueness": metric_uniqueness_case,
    "connection-uniqueness": connection_uniqueness_case,
    "torsion": torsion_case,
    "flat": flat_case,
    "laplacian": laplacian_case,
    "one-dimensional": one_dimensional_case,
    "moyal": moyal_case,
    "naturality": naturality_case,
}


def run_suite(name: str, seed: int, cases: int) -> SuiteReport:
    check = SUITES[name]
    report = SuiteReport(name)
    rng = random.Random(f"{seed}:{name}")
    for _ in range(cases):
        report.cases += 1
        try:
            good = check(rng)
        except InvariantViolation:
            report.invariant_violations += 1
            continue
        except BackendIncompleteError:
            report.backend_incomplete += 1
            report.failed += 1
            continue
        if good:
            report.passed += 1
        else:
            report.failed += 1
    return report


def run_suites(seed: int = 0, cases: int = 20, names=None) -> list[SuiteReport]:
    names = list(SUITES) if names is None else list(names)
    return [run_suite(name, seed, cases) for name in names]
