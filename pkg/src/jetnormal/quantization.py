"""Star products: the Moyal product and its canonical transport to a point.

Normalization: ``{f, g} = omega^{ij} d_i f d_j g`` summed over the full
antisymmetric matrix, and the first-order term of every star product is
``1/2 {f, g}``, so that ``x^1 * x^2 - x^2 * x^1 = hbar {x^1, x^2}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Protocol

from .connection_normalizer import normalize_connection
from .errors import BackendIncompleteError, DomainError, StructuralError
from .jet_algebra import ScalarJet, jet_multiply, jet_partial
from .jet_groups import ConnectionJet, PoissonJet, TensorJet, act_on_scalar_jet, act_on_tensor_jet

MAX_HBAR_ORDER = 4
DEFAULT_HBAR_ORDER = 2


@dataclass(frozen=True)
class FormalSeries:
    """``c_0 + c_1 hbar + ... + c_N hbar^N``, truncated at ``hbar^N``."""

    coefficients: tuple

    @property
    def hbar_order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, r: int):
        return self.coefficients[r]

    def __len__(self):
        return len(self.coefficients)

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        n = min(len(self), len(other))
        return FormalSeries(tuple(a + b for a, b in zip(self.coefficients[:n], other.coefficients[:n])))

    def at_zero(self) -> "FormalSeries":
        return FormalSeries(tuple(c.constant_term if isinstance(c, ScalarJet) else c for c in self.coefficients))


def _as_poisson(omega, order: int = 0) -> PoissonJet:
    """Accept a Poisson jet or a raw matrix, which is taken as exactly constant."""
    if isinstance(omega, PoissonJet):
        return omega
    if isinstance(omega, TensorJet) and omega.valence == (2, 0) and omega.symmetry == "antisymmetric-contravariant":
        return PoissonJet(omega.dim, omega.order, omega.components)
    if isinstance(omega, (list, tuple)):
        mat = _constant_matrix(omega)
        return PoissonJet.constant(mat, order)
    raise StructuralError("expected a Poisson jet or an antisymmetric matrix")


def poisson_bracket(omega, f: ScalarJet, g: ScalarJet) -> ScalarJet:
    """``{f, g}`` as a jet of order ``min(orders) - 1``."""
    omega = _as_poisson(omega, max(f.order, g.order))
    if not (omega.dim == f.dim == g.dim):
        raise StructuralError("Poisson structure and functions must share the dimension")
    k = min(f.order, g.order, omega.order + 1) - 1
    if k < 0:
        raise DomainError("the bracket needs function jets of order >= 1")
    df = [jet_partial(f, i).truncate(k) for i in range(f.dim)]
    dg = [jet_partial(g, j).truncate(k) for j in range(g.dim)]
    out = ScalarJet._new(f.dim, k, {})
    for (i, j), w in omega.components.items():
        if df[i].is_zero() or dg[j].is_zero():
            continue
        out = out + jet_multiply(jet_multiply(w.truncate(k), df[i]), dg[j])
    return out


def check_jacobi(omega: PoissonJet) -> bool:
    """Jacobi identity ``sum_cyc omega^{il} d_l omega^{jk} = 0`` through the available order."""
    omega = _as_poisson(omega)
    m, k = omega.dim, omega.order - 1
    if k < 0:
        return True
    w = {idx: c.truncate(k) for idx, c in omega.components.items()}
    dw = {(idx, l): jet_partial(c, l) for idx, c in omega.components.items() for l in range(m)}
    zero = ScalarJet._new(m, k, {})
    for i in range(m):
        for j in range(m):
            for kk in range(m):
                acc = zero
                for a, b, c in ((i, j, kk), (j, kk, i), (kk, i, j)):
                    for l in range(m):
                        x, y = w.get((a, l)), dw.get(((b, c), l))
                        if x is not None and y is not None:
                            acc = acc + jet_multiply(x, y)
                if not acc.is_zero():
                    return False
    return True


def _constant_matrix(omega0) -> list[list[Fraction]]:
    if isinstance(omega0, TensorJet):
        omega0 = _as_poisson(omega0)
        if any(not c.is_constant() for c in omega0.components.values()):
            raise DomainError("the Moyal backend needs a constant Poisson structure")
        return omega0.matrix_at_zero()
    mat = [[Fraction(x) for x in row] for row in omega0]
    n = len(mat)
    if any(mat[i][j] != -mat[j][i] for i in range(n) for j in range(n)):
        raise StructuralError("Poisson matrix must be antisymmetric")
    return mat


def _bidifferential_terms(mat, r: int) -> dict[tuple, Fraction]:
    """``{(alpha, beta): coeff}`` of ``(omega^{ij} d_i (x) d_j)^r``."""
    m = len(mat)
    terms = {((0,) * m, (0,) * m): Fraction(1)}
    pairs = [(i, j, mat[i][j]) for i in range(m) for j in range(m) if mat[i][j]]
    for _ in range(r):
        nxt: dict[tuple, Fraction] = {}
        for (a, b), c in terms.items():
            for i, j, w in pairs:
                key = (a[:i] + (a[i] + 1,) + a[i + 1:], b[:j] + (b[j] + 1,) + b[j + 1:])
                nxt[key] = nxt.get(key, 0) + c * w
        terms = {k: v for k, v in nxt.items() if v}
    return terms


def moyal_coefficient(mat, f: ScalarJet, g: ScalarJet, r: int) -> ScalarJet:
    """``c_r = (1/r!) (1/2^r) omega^{i1 j1}...omega^{ir jr} d_I f d_J g``."""
    k = min(f.order, g.order) - r
    if k < 0:
        raise DomainError(f"Moyal term of order {r} needs jets of order >= {r}")
    f, g = f.truncate(k + r), g.truncate(k + r)
    if r == 0:
        return jet_multiply(f, g)
    scale = Fraction(1, factorial(r) * 2 ** r)
    out = ScalarJet._new(f.dim, k, {})
    dfs: dict[tuple, ScalarJet] = {}
    dgs: dict[tuple, ScalarJet] = {}
    for (a, b), c in _bidifferential_terms(mat, r).items():
        if a not in dfs:
            dfs[a] = f.derivative(a)
        if b not in dgs:
            dgs[b] = g.derivative(b)
        if dfs[a].is_zero() or dgs[b].is_zero():
            continue
        out = out + jet_multiply(dfs[a], dgs[b]).scale(c * scale)
    return out


def _check_hbar_order(N: int) -> None:
    if not isinstance(N, int) or N < 0:
        raise StructuralError(f"hbar order must be a non-negative integer, got {N!r}")
    if N > MAX_HBAR_ORDER:
        raise DomainError(f"hbar order {N} exceeds the supported maximum {MAX_HBAR_ORDER}")


def moyal_star(omega0, f: ScalarJet, g: ScalarJet, N: int = DEFAULT_HBAR_ORDER) -> FormalSeries:
    """Moyal product of two jets for a constant Poisson structure.

    Coefficient ``c_r`` is a jet of order ``min(f.order, g.order) - r``.
    """
    _check_hbar_order(N)
    mat = _constant_matrix(omega0)
    if not (len(mat) == f.dim == g.dim):
        raise StructuralError("Poisson structure and functions must share the dimension")
    return FormalSeries(tuple(moyal_coefficient(mat, f, g, r) for r in range(N + 1)))


def _common(a: ScalarJet, b: ScalarJet) -> tuple[ScalarJet, ScalarJet]:
    k = min(a.order, b.order)
    return a.truncate(k), b.truncate(k)


def associativity_check(omega0, f, g, h, N: int = DEFAULT_HBAR_ORDER, star=None) -> bool:
    """``(f * g) * h == f * (g * h)`` slot by slot through ``hbar^N``.

    ``star(omega0, a, b, N)`` defaults to :func:`moyal_star`.
    """
    star = moyal_star if star is None else star
    fg, gh = star(omega0, f, g, N), star(omega0, g, h, N)
    for r in range(N + 1):
        left = right = None
        for a in range(r + 1):
            lt = star(omega0, fg[a], h, r - a)[r - a]
            rt = star(omega0, f, gh[a], r - a)[r - a]
            left = lt if left is None else jet_add_common(left, lt)
            right = rt if right is None else jet_add_common(right, rt)
        left, right = _common(left, right)
        if left != right:
            return False
    return True


def jet_add_common(a: ScalarJet, b: ScalarJet) -> ScalarJet:
    a, b = _common(a, b)
    return a + b


class StarBackend(Protocol):
    name: str

    def at_point(self, omega: PoissonJet, f: ScalarJet, g: ScalarJet, N: int) -> FormalSeries: ...

    def omega_order(self, N: int) -> int: ...


class MoyalBackend:
    """Moyal formula with ``omega(0)``; exact when ``omega`` is constant.

    Through ``hbar^1`` the result is tensorial and valid for any ``omega``.
    Beyond that the transported ``omega`` must be constant through jet order
    ``2N - 2``; otherwise the backend refuses rather than guess.
    """

    name = "moyal"

    def omega_order(self, N: int) -> int:
        return 0 if N <= 1 else 2 * N - 2

    def at_point(self, omega: PoissonJet, f: ScalarJet, g: ScalarJet, N: int) -> FormalSeries:
        need = self.omega_order(N)
        if omega.order < need:
            raise DomainError(f"hbar order {N} needs a Poisson jet of order >= {need}")
        if N >= 2:
            for c in omega.components.values():
                if any(0 < d <= need for d in c.degrees()):
                    raise BackendIncompleteError(
                        f"Moyal backend is incomplete for nonconstant Poisson structures at hbar order {N}: "
                        f"the adapted omega is not constant through jet order {need}"
                    )
        mat = omega.matrix_at_zero()
        return FormalSeries(
            tuple(moyal_coefficient(mat, f, g, r).constant_term for r in range(N + 1))
        )


def adaptation_order(N: int, backend: StarBackend) -> int:
    """Smallest connection normalization depth whose chart transports all inputs."""
    # chart of depth n has order n + 2; functions need N + 1, omega needs omega_order + 1
    return max(0, N - 1, backend.omega_order(N) - 1)


def canonical_star_at_point(
    theta: ConnectionJet,
    omega: PoissonJet,
    f: ScalarJet,
    g: ScalarJet,
    N: int = DEFAULT_HBAR_ORDER,
    backend: StarBackend | None = None,
) -> FormalSeries:
    """Star product at the origin computed in the connection-adapted chart."""
    _check_hbar_order(N)
    backend = MoyalBackend() if backend is None else backend
    omega = _as_poisson(omega)
    if not isinstance(theta, ConnectionJet):
        raise StructuralError("expected a connection jet")
    if not (theta.dim == omega.dim == f.dim == g.dim):
        raise StructuralError("connection, Poisson structure and functions must share the dimension")
    if not check_jacobi(omega):
        raise DomainError("Poisson structure fails the Jacobi identity")
    if f.order < N or g.order < N:
        raise DomainError(f"hbar order {N} needs function jets of order >= {N}")
    depth = adaptation_order(N, backend)
    if theta.order < depth:
        raise DomainError(f"hbar order {N} needs a connection jet of order >= {depth}")
    chart = normalize_connection(theta, depth).chart()
    w_order = backend.omega_order(N)
    if omega.order < w_order:
        raise DomainError(f"hbar order {N} needs a Poisson jet of order >= {w_order}")
    omega_t = act_on_tensor_jet(chart.truncate(w_order + 1), omega.truncate(w_order))
    f_t = act_on_scalar_jet(chart.truncate(N + 1), f.truncate(N))
    g_t = act_on_scalar_jet(chart.truncate(N + 1), g.truncate(N))
    return backend.at_point(omega_t, f_t, g_t, N)
