import random
from fractions import Fraction
from pathlib import Path

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from jetnormal import (
    BackendIncompleteError,
    ConnectionJet,
    DomainError,
    FormalSeries,
    PoissonJet,
    ScalarJet,
    StructuralError,
    act_on_connection_jet,
    act_on_scalar_jet,
    act_on_tensor_jet,
    adapted_chart,
    associativity_check,
    canonical_star_at_point,
    moyal_star,
    parse_jet_file,
    poisson_bracket,
)
from jetnormal import random_jets as rj
from jetnormal.jet_groups import diffeo_invert
from jetnormal.quantization import MAX_HBAR_ORDER, check_jacobi, moyal_coefficient

from oracles import from_scalar_jet, moyal_symbolic, symbols, to_scalar_jet

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
CANONICAL = [[0, 1], [-1, 0]]
HALF = Fraction(1, 2)
seeds = st.integers(min_value=0, max_value=10**6)


def coord(m, i, order):
    return ScalarJet(m, order, {tuple(int(t == i) for t in range(m)): 1})


class TestBracket:
    def test_canonical_pair(self):
        assert poisson_bracket(CANONICAL, coord(2, 0, 1), coord(2, 1, 1)) == ScalarJet.constant(1, 2, 0)

    def test_antisymmetry(self):
        f = rj.scalar_jet(random.Random(0), 2, 3)
        assert poisson_bracket(CANONICAL, f, f).is_zero()

    def test_quadratic_example(self):
        f = ScalarJet(2, 3, {(2, 0): 1})
        g = ScalarJet(2, 3, {(1, 1): 1})
        assert poisson_bracket(CANONICAL, f, g) == ScalarJet(2, 2, {(2, 0): 2})

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_derivation(self, seed):
        rng = random.Random(seed)
        omega = rj.constant_poisson(rng, 3, 3)
        f, g, h = (rj.scalar_jet(rng, 3, 3) for _ in range(3))
        assert poisson_bracket(omega, f, g * h) == poisson_bracket(omega, f, g) * h.truncate(2) + g.truncate(2) * poisson_bracket(omega, f, h)

    def test_order_requirement(self):
        with pytest.raises(DomainError):
            poisson_bracket(CANONICAL, ScalarJet.constant(1, 2, 0), ScalarJet.constant(1, 2, 0))

    def test_dimension_mismatch(self):
        with pytest.raises(StructuralError):
            poisson_bracket(CANONICAL, coord(3, 0, 1), coord(3, 1, 1))


class TestJacobi:
    def test_two_dimensional_bivectors_always_pass(self):
        omega = PoissonJet(2, 2, {(0, 1): {(0, 0): 1, (1, 0): 2, (1, 1): -1}, (1, 0): {(0, 0): -1, (1, 0): -2, (1, 1): 1}})
        assert check_jacobi(omega)

    def test_failure_in_three_dimensions(self):
        omega = PoissonJet(3, 1, {(0, 1): {(0, 0, 0): 1}, (1, 0): {(0, 0, 0): -1}, (1, 2): {(0, 1, 0): 1}, (2, 1): {(0, 1, 0): -1}})
        assert not check_jacobi(omega)

    def test_linear_poisson_structure_of_so3(self):
        # omega^{ij} = eps_{ijk} z^k is a Lie-Poisson structure
        comps = {}
        for i, j, k, s in ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)):
            mono = tuple(int(t == k) for t in range(3))
            comps[(i, j)] = {mono: s}
            comps[(j, i)] = {mono: -s}
        assert check_jacobi(PoissonJet(3, 2, comps))


class TestMoyal:
    def test_zero_structure_is_commutative(self):
        rng = random.Random(1)
        f, g = rj.scalar_jet(rng, 2, 3), rj.scalar_jet(rng, 2, 3)
        series = moyal_star([[0, 0], [0, 0]], f, g, 3)
        assert series[0] == f * g
        assert all(c.is_zero() for c in series.coefficients[1:])

    def test_canonical_commutator(self):
        x, y = coord(2, 0, 2), coord(2, 1, 2)
        xy, yx = moyal_star(CANONICAL, x, y, 2), moyal_star(CANONICAL, y, x, 2)
        assert (xy[0] - yx[0]).is_zero()
        assert xy[1] - yx[1] == ScalarJet.constant(1, 2, 1)
        assert (xy[2] - yx[2]).is_zero()

    def test_associativity_example(self):
        x, y = coord(2, 0, 4), coord(2, 1, 4)
        assert associativity_check(CANONICAL, x, x, y, 2)

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_against_symbolic_expansion(self, seed):
        rng = random.Random(seed)
        m, N = rng.choice((2, 3)), rng.randint(0, 3)
        omega = rj.constant_poisson(rng, m).matrix_at_zero()
        f, g = rj.scalar_jet(rng, m, 4), rj.scalar_jet(rng, m, 3)
        zs = symbols(m)
        expected = moyal_symbolic(omega, from_scalar_jet(f, zs), from_scalar_jet(g, zs), zs, N)
        got = moyal_star(omega, f, g, N)
        for r in range(N + 1):
            assert got[r] == to_scalar_jet(expected[r], zs, 3 - r)

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_argument_symmetry(self, seed):
        rng = random.Random(seed)
        omega = rj.constant_poisson(rng, 3).matrix_at_zero()
        f, g = rj.scalar_jet(rng, 3, 4), rj.scalar_jet(rng, 3, 4)
        fg, gf = moyal_star(omega, f, g, 4), moyal_star(omega, g, f, 4)
        for r in range(5):
            assert fg[r] == gf[r].scale((-1) ** r)

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_associative_for_any_constant_structure(self, seed):
        rng = random.Random(seed)
        omega = rj.constant_poisson(rng, 3).matrix_at_zero()
        f, g, h = (rj.scalar_jet(rng, 3, 2) for _ in range(3))
        assert associativity_check(omega, f, g, h, 2)
        assert associativity_check([[0] * 3] * 3, f, g, h, 2)

    def test_corrupted_second_slot_is_detected(self):
        def corrupted(omega0, a, b, N):
            series = moyal_star(omega0, a, b, N)
            if N < 2:
                return series
            c = list(series.coefficients)
            c[2] = c[2] + ScalarJet.constant(1, a.dim, c[2].order)
            return FormalSeries(tuple(c))

        x, y = coord(2, 0, 3), coord(2, 1, 3)
        assert associativity_check(CANONICAL, x, x, y, 2)
        assert not associativity_check(CANONICAL, x, x, y, 2, star=corrupted)

    def test_nonconstant_structure_rejected(self):
        omega = PoissonJet(2, 1, {(0, 1): {(1, 0): 1}, (1, 0): {(1, 0): -1}})
        with pytest.raises(DomainError):
            moyal_star(omega, coord(2, 0, 2), coord(2, 1, 2), 1)

    def test_hbar_order_cap(self):
        x = coord(2, 0, 6)
        moyal_star(CANONICAL, x, x, MAX_HBAR_ORDER)
        with pytest.raises(DomainError):
            moyal_star(CANONICAL, x, x, MAX_HBAR_ORDER + 1)
        with pytest.raises(StructuralError):
            moyal_star(CANONICAL, x, x, -1)

    def test_coefficient_needs_enough_order(self):
        with pytest.raises(DomainError):
            moyal_coefficient(CANONICAL, coord(2, 0, 1), coord(2, 1, 1), 2)


def poisson_constant_in_chart(theta, mat, N):
    """Pull back a constant matrix from the adapted chart of ``theta`` to the original chart."""
    order = 0 if N <= 1 else 2 * N - 2
    depth = max(0, N - 1, order - 1)
    chart = adapted_chart(theta, depth).truncate(order + 1)
    return act_on_tensor_jet(diffeo_invert(chart), PoissonJet.constant(mat, order))


class TestCanonicalStar:
    def test_flat_connection_gives_moyal(self):
        f, g = parse_jet_file(FIXTURES / "f.json"), parse_jet_file(FIXTURES / "g.json")
        omega = PoissonJet.constant(CANONICAL, 2)
        got = canonical_star_at_point(ConnectionJet.zero(2, 1), omega, f, g, 2)
        assert got == moyal_star(CANONICAL, f, g, 2).at_zero()

    @pytest.mark.parametrize("seed", range(5))
    def test_first_order_ignores_the_connection(self, seed):
        rng = random.Random(seed)
        theta = rj.connection_jet(rng, 2, 2, density=0.8)
        x, y = coord(2, 0, 1), coord(2, 1, 1)
        assert canonical_star_at_point(theta, PoissonJet.constant(CANONICAL), x, y, 1) == FormalSeries((0, HALF))

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_first_order_is_tensorial_for_nonconstant_structures(self, seed):
        rng = random.Random(seed)
        theta = rj.connection_jet(rng, 2, 1)
        entry = rj.scalar_jet(rng, 2, 1)
        omega = PoissonJet(2, 1, {(0, 1): entry, (1, 0): entry.scale(-1)})
        f, g = rj.scalar_jet(rng, 2, 2), rj.scalar_jet(rng, 2, 2)
        got = canonical_star_at_point(theta, omega, f, g, 1)
        assert got[0] == f.constant_term * g.constant_term
        assert got[1] == poisson_bracket(omega, f, g).constant_term / 2

    def test_backend_incompleteness_is_explicit(self):
        omega = PoissonJet(2, 2, {(0, 1): {(0, 0): 1, (1, 0): 1}, (1, 0): {(0, 0): -1, (1, 0): -1}})
        x, y = coord(2, 0, 2), coord(2, 1, 2)
        with pytest.raises(BackendIncompleteError):
            canonical_star_at_point(ConnectionJet.zero(2, 1), omega, x, y, 2)
        assert isinstance(BackendIncompleteError("x"), DomainError)

    def test_jacobi_failure(self):
        omega = PoissonJet(3, 1, {(0, 1): {(0, 0, 0): 1}, (1, 0): {(0, 0, 0): -1}, (1, 2): {(0, 1, 0): 1}, (2, 1): {(0, 1, 0): -1}})
        x = coord(3, 0, 1)
        with pytest.raises(DomainError, match="Jacobi"):
            canonical_star_at_point(ConnectionJet.zero(3, 0), omega, x, x, 1)

    def test_insufficient_connection_order(self):
        with pytest.raises(DomainError):
            canonical_star_at_point(ConnectionJet.zero(2, 0), PoissonJet.constant(CANONICAL, 2), coord(2, 0, 2), coord(2, 1, 2), 2)

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_naturality_under_unipotent_changes(self, seed):
        rng = random.Random(seed)
        m, N = rng.choice((2, 3)), rng.choice((1, 2))
        depth = max(0, N - 1, 2 * N - 3)
        theta = rj.connection_jet(rng, m, depth)
        omega = poisson_constant_in_chart(theta, rj.constant_poisson(rng, m).matrix_at_zero(), N)
        f, g = rj.scalar_jet(rng, m, N), rj.scalar_jet(rng, m, N)
        u = rj.unipotent(rng, m, depth + 2, density=0.8)
        before = canonical_star_at_point(theta, omega, f, g, N)
        after = canonical_star_at_point(
            act_on_connection_jet(u, theta),
            act_on_tensor_jet(u.truncate(omega.order + 1), omega),
            act_on_scalar_jet(u.truncate(N + 1), f),
            act_on_scalar_jet(u.truncate(N + 1), g),
            N,
        )
        assert before == after
        assert before[0] == f.constant_term * g.constant_term


def test_symbolic_oracle_reproduces_commutator():
    zs = symbols(2)
    series = moyal_symbolic(CANONICAL, zs[0], zs[1], zs, 2)
    reverse = moyal_symbolic(CANONICAL, zs[1], zs[0], zs, 2)
    assert sp.simplify(series[1] - reverse[1]) == 1
