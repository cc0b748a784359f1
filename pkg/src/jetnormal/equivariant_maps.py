"""The contraction maps defining the normal-form slots.

``delta_n`` sends a degree-n metric slot ``h_ij(z)`` to the covector-valued
polynomial ``2 z^i h_ib(z)`` (the Euler contraction of ``z`` against the
quadratic form).  ``gamma_n`` sends a degree-n connection slot to the vector
valued polynomial ``theta^l_ij(z) z^i z^j``.  Their kernels ``L_n`` and
``C_n`` are the admissible slots of metric and connection normal forms.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from itertools import product

from . import linalg
from .errors import StructuralError
from .jet_algebra import ScalarJet, monomials, unit
from .jet_groups import ConnectionJet, TensorJet

_cache_lock = threading.Lock()
_kernel_cache: dict[tuple, list] = {}
_matrix_cache: dict[tuple, list] = {}


def _var(dim: int, i: int, order: int) -> ScalarJet:
    return ScalarJet._new(dim, order, {unit(dim, i): Fraction(1)})


def _require_homogeneous(x, n: int, what: str) -> None:
    bad = {sum(m) for c in x.components.values() for m in c.coeffs} - {n}
    if bad:
        raise StructuralError(f"{what} must be homogeneous of degree {n}, found degrees {sorted(bad)}")


def delta_n(h_n: TensorJet, n: int | None = None) -> TensorJet:
    """``S^n (x) S^2 -> S^{n+1} (x) R^m*``; result is a (0,1)-tensor jet of order n+1."""
    if not isinstance(h_n, TensorJet) or h_n.valence != (0, 2):
        raise StructuralError("delta_n acts on (0,2)-tensor slots")
    n = h_n.order if n is None else n
    _require_homogeneous(h_n, n, "metric slot")
    dim = h_n.dim
    out: dict[tuple, ScalarJet] = {}
    for (i, b), c in h_n.components.items():
        term = (c.extend(n + 1) * _var(dim, i, n + 1)).scale(2)
        out[(b,)] = out[(b,)] + term if (b,) in out else term
    return TensorJet(dim, n + 1, (0, 1), out)


def gamma_n(theta_n: ConnectionJet, n: int | None = None) -> TensorJet:
    """``S^n (x) R^m (x) R^m* (x) R^m* -> S^{n+2} (x) R^m``; a (1,0)-tensor jet of order n+2."""
    if not isinstance(theta_n, ConnectionJet):
        raise StructuralError("gamma_n acts on connection slots")
    n = theta_n.order if n is None else n
    _require_homogeneous(theta_n, n, "connection slot")
    dim = theta_n.dim
    out: dict[tuple, ScalarJet] = {}
    for (l, i, j), c in theta_n.components.items():
        zz = _var(dim, i, n + 2) * _var(dim, j, n + 2)
        term = c.extend(n + 2) * zz
        out[(l,)] = out[(l,)] + term if (l,) in out else term
    return TensorJet(dim, n + 2, (1, 0), out)


def kernel_membership(x, which: str, n: int | None = None) -> bool:
    """True iff ``x`` lies in ``L_n`` (``which="L"``) or ``C_n`` (``which="C"``)."""
    if which == "L":
        return delta_n(x, n).is_zero()
    if which == "C":
        return gamma_n(x, n).is_zero()
    raise StructuralError(f"unknown kernel {which!r}; expected 'L' or 'C'")


# -- coordinate bases -----------------------------------------------------


def metric_slot_basis(dim: int, n: int) -> list[tuple]:
    """Basis keys ``(monomial, (i, j))`` with ``i <= j`` of ``S^n (x) S^2``."""
    pairs = [(i, j) for i in range(dim) for j in range(i, dim)]
    return [(mono, pair) for mono in monomials(dim, n) for pair in pairs]


def connection_slot_basis(dim: int, n: int) -> list[tuple]:
    return [(mono, idx) for mono in monomials(dim, n) for idx in product(range(dim), repeat=3)]


def vector_poly_basis(dim: int, degree: int) -> list[tuple]:
    """Basis keys ``(monomial, (a,))`` of ``S^degree (x) R^m`` (or its dual)."""
    return [(mono, (a,)) for mono in monomials(dim, degree) for a in range(dim)]


def metric_slot_from_vector(dim: int, n: int, vec) -> TensorJet:
    comps: dict[tuple, dict] = {}
    for (mono, (i, j)), v in zip(metric_slot_basis(dim, n), vec):
        if v:
            comps.setdefault((i, j), {})[mono] = v
            if i != j:
                comps.setdefault((j, i), {})[mono] = v
    return TensorJet(dim, n, (0, 2), comps, "symmetric-covariant")


def metric_slot_to_vector(h_n: TensorJet, n: int) -> list[Fraction]:
    return [h_n.component(pair)[mono] for mono, pair in metric_slot_basis(h_n.dim, n)]


def connection_slot_from_vector(dim: int, n: int, vec) -> ConnectionJet:
    comps: dict[tuple, dict] = {}
    for (mono, idx), v in zip(connection_slot_basis(dim, n), vec):
        if v:
            comps.setdefault(idx, {})[mono] = v
    return ConnectionJet(dim, n, comps)


def connection_slot_to_vector(theta_n: ConnectionJet, n: int) -> list[Fraction]:
    return [theta_n.component(idx)[mono] for mono, idx in connection_slot_basis(theta_n.dim, n)]


def tensor_to_vector(t: TensorJet, basis) -> list[Fraction]:
    return [t.component(idx)[mono] for mono, idx in basis]


def map_matrix(which: str, dim: int, n: int) -> list[list[Fraction]]:
    """Matrix of ``delta_n`` or ``gamma_n`` on the monomial bases (cached)."""
    key = (which, dim, n)
    with _cache_lock:
        cached = _matrix_cache.get(key)
    if cached is not None:
        return cached
    if which == "L":
        src = metric_slot_basis(dim, n)
        dst = vector_poly_basis(dim, n + 1)
        cols = []
        for t in range(len(src)):
            e = [Fraction(int(s == t)) for s in range(len(src))]
            cols.append(tensor_to_vector(delta_n(metric_slot_from_vector(dim, n, e), n), dst))
    elif which == "C":
        src = connection_slot_basis(dim, n)
        dst = vector_poly_basis(dim, n + 2)
        cols = []
        for t in range(len(src)):
            e = [Fraction(int(s == t)) for s in range(len(src))]
            cols.append(tensor_to_vector(gamma_n(connection_slot_from_vector(dim, n, e), n), dst))
    else:
        raise StructuralError(f"unknown kernel {which!r}")
    mat = [[cols[c][r] for c in range(len(cols))] for r in range(len(dst))]
    with _cache_lock:
        _matrix_cache.setdefault(key, mat)
    return mat


def kernel_basis(which: str, dim: int, n: int) -> list:
    """Basis of ``L_n`` or ``C_n`` as slot objects (cached)."""
    key = (which, dim, n)
    with _cache_lock:
        cached = _kernel_cache.get(key)
    if cached is not None:
        return cached
    mat = map_matrix(which, dim, n)
    ncols = len(metric_slot_basis(dim, n) if which == "L" else connection_slot_basis(dim, n))
    vecs = linalg.nullspace(mat, ncols)
    build = metric_slot_from_vector if which == "L" else connection_slot_from_vector
    basis = [build(dim, n, v) for v in vecs]
    with _cache_lock:
        _kernel_cache.setdefault(key, basis)
    return basis


def kernel_dimension(which: str, dim: int, n: int) -> int:
    return len(kernel_basis(which, dim, n))


def map_rank(which: str, dim: int, n: int) -> int:
    return linalg.rank(map_matrix(which, dim, n))
