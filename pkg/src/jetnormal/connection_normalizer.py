"""Normal forms of connection jets and adapted charts.

The unipotent group acts affinely on connection jets.  At step ``n`` the
degree-n slot of ``(E + g_{n+2}) . theta'`` is ``theta'_n - d_i d_j g_{n+2}``,
and requiring it to lie in ``C_n = ker gamma_n`` gives, by Euler's identity,

    g_{n+2} = gamma_n(theta'_n) / ((n + 2)(n + 1)).

The surviving slots ``Psi_0, ..., Psi_k`` are the connection invariants;
``Psi_0`` is the torsion.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .equivariant_maps import gamma_n, kernel_membership, tensor_to_vector, vector_poly_basis
from .errors import DomainError, InvariantViolation, StructuralError
from .jet_algebra import ScalarJet
from .jet_groups import (
    ConnectionJet,
    DiffeoJet,
    UnipotentFactors,
    act_on_connection_jet,
    elementary_factor,
    eta_assemble,
)
from .metric_normalizer import factor_basis, factor_from_vector

_probe_lock = threading.Lock()
_probe_cache: dict[tuple[int, int], list] = {}


def closed_form_factor(slot: ConnectionJet, n: int) -> tuple[ScalarJet, ...]:
    g = gamma_n(slot, n)
    d = Fraction(1, (n + 2) * (n + 1))
    return tuple(g.component((a,)).scale(d) for a in range(slot.dim))


def _probe(dim: int, n: int, base: ConnectionJet) -> list[ConnectionJet]:
    basis = factor_basis(dim, n + 2)
    before = base.homogeneous(n)
    out = []
    for t in range(len(basis)):
        e = [int(s == t) for s in range(len(basis))]
        step = elementary_factor(factor_from_vector(dim, n + 2, e), n + 2)
        out.append(act_on_connection_jet(step, base).homogeneous(n) - before)
    return out


def probe_images(dim: int, n: int) -> list[ConnectionJet]:
    """Slot-n response of the zero connection to each basis factor (cached).

    The action is affine with a linear part that does not see ``theta`` at
    slot n, so the zero connection suffices.
    """
    key = (dim, n)
    with _probe_lock:
        cached = _probe_cache.get(key)
    if cached is not None:
        return cached
    images = _probe(dim, n, ConnectionJet.zero(dim, n))
    with _probe_lock:
        _probe_cache.setdefault(key, images)
    return images


def probing_factor(current: ConnectionJet, n: int, direct: bool = False) -> tuple[ScalarJet, ...]:
    """Solve for ``g_{n+2}`` by a generic linear solve over probed responses.

    With ``direct=True`` the probes act on ``current`` itself rather than on
    the cached zero-connection images.
    """
    dim = current.dim
    responses = _probe(dim, n, current.truncate(n)) if direct else probe_images(dim, n)
    dst = vector_poly_basis(dim, n + 2)
    cols = [tensor_to_vector(gamma_n(r, n), dst) for r in responses]
    rhs = [-v for v in tensor_to_vector(gamma_n(current.homogeneous(n), n), dst)]
    matrix = [[col[r] for col in cols] for r in range(len(rhs))]
    return factor_from_vector(dim, n + 2, linalg.solve_unique(matrix, rhs))


@dataclass(frozen=True)
class ConnectionNormalForm:
    invariants: tuple[ConnectionJet, ...]  # Psi_0, ..., Psi_k
    normalizer: UnipotentFactors  # g_2, ..., g_{k+2}
    order: int

    @property
    def dim(self) -> int:
        return self.normalizer.dim

    @property
    def torsion(self) -> ConnectionJet:
        return self.invariants[0]

    def jet(self) -> ConnectionJet:
        m = self.dim
        comps: dict[tuple, dict] = {}
        for psi in self.invariants:
            for idx, c in psi.components.items():
                comps.setdefault(idx, {}).update(c.coeffs)
        return ConnectionJet(m, self.order, comps)

    def chart(self) -> DiffeoJet:
        return eta_assemble(self.normalizer, self.order + 2)

    def certify(self, theta: ConnectionJet | None = None) -> dict[str, bool]:
        checks = {f"Psi_{n}_in_C_{n}": kernel_membership(p, "C", n) for n, p in enumerate(self.invariants)}
        if theta is not None:
            checks["normalizer_reproduces_normal_form"] = (
                act_on_connection_jet(self.chart(), theta.truncate(self.order)) == self.jet()
            )
        return checks


def normalize_connection(theta: ConnectionJet, k: int | None = None, method: str = "closed") -> ConnectionNormalForm:
    """Normalize ``theta`` through order ``k``.

    ``method`` selects the factor solver: ``"closed"`` (Euler formula) or
    ``"probe"`` (generic linear solve).  Both give the same unique factors.
    """
    if not isinstance(theta, ConnectionJet):
        raise StructuralError(f"expected a ConnectionJet, got {type(theta).__name__}")
    k = theta.order if k is None else k
    if k < 0:
        raise StructuralError(f"normal form order must be non-negative, got {k}")
    if k > theta.order:
        raise DomainError(f"normal form of order {k} needs a connection jet of order >= {k} (got {theta.order})")
    if method not in ("closed", "probe"):
        raise StructuralError(f"unknown factor solver {method!r}")
    current = theta.truncate(k)
    terms = []
    for n in range(k + 1):
        if method == "closed":
            g = closed_form_factor(current.homogeneous(n), n)
        else:
            g = probing_factor(current, n)
        terms.append(g)
        current = act_on_connection_jet(elementary_factor(g, k + 2), current)
    invariants = tuple(current.homogeneous(n) for n in range(k + 1))
    for n, psi in enumerate(invariants):
        if not kernel_membership(psi, "C", n):
            raise InvariantViolation(f"normalized connection slot {n} is not in ker gamma_{n}")
    return ConnectionNormalForm(invariants=invariants, normalizer=UnipotentFactors(theta.dim, terms), order=k)


def normalize_connection_checked(theta: ConnectionJet, k: int | None = None) -> ConnectionNormalForm:
    """Run both solvers step by step and insist that the factors agree."""
    k = theta.order if k is None else k
    current = theta.truncate(k)
    terms = []
    for n in range(k + 1):
        closed = closed_form_factor(current.homogeneous(n), n)
        probed = probing_factor(current, n)
        if closed != probed:
            raise InvariantViolation(f"closed-form and probed factors g_{n + 2} disagree")
        terms.append(closed)
        current = act_on_connection_jet(elementary_factor(closed, k + 2), current)
    invariants = tuple(current.homogeneous(n) for n in range(k + 1))
    return ConnectionNormalForm(invariants=invariants, normalizer=UnipotentFactors(theta.dim, terms), order=k)


def torsion(theta: ConnectionJet) -> ConnectionJet:
    """The order-0 invariant ``Psi_0``."""
    if not isinstance(theta, ConnectionJet):
        raise StructuralError(f"expected a ConnectionJet, got {type(theta).__name__}")
    return normalize_connection(theta.truncate(0), 0).invariants[0]


def adapted_chart(theta: ConnectionJet, n: int) -> DiffeoJet:
    """Chart of order ``n + 2`` in which slots ``0..n`` of ``theta`` lie in ``C_l``."""
    if n > theta.order:
        raise DomainError(f"adapted chart through order {n} needs a connection jet of order >= {n}")
    return normalize_connection(theta, n).chart()
