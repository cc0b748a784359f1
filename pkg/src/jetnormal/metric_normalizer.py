"""Normal forms of metric jets under unipotent coordinate changes.

Given ``h = h_0 + h_1 + ... + h_k`` the normalizer finds unique homogeneous
factors ``g_2, ..., g_{k+1}`` such that pushing ``h`` forward by
``(E + g_{k+1}) o ... o (E + g_2)`` kills ``h_1`` and moves every ``h_n``
(``n >= 2``) into ``L_n = ker delta_n``.  The surviving slots ``A_n`` are
the curvature invariants of the jet.

Each factor solves an exact square linear system whose matrix is obtained
by probing the group action with basis elements of ``S^{n+1} (x) R^m``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .equivariant_maps import (
    delta_n,
    kernel_membership,
    metric_slot_to_vector,
    tensor_to_vector,
    vector_poly_basis,
)
from .errors import DomainError, InvariantViolation, StructuralError
from .jet_algebra import ScalarJet, monomials
from .jet_groups import (
    DiffeoJet,
    MetricJet,
    TensorJet,
    UnipotentFactors,
    act_on_tensor_jet,
    elementary_factor,
    eta_assemble,
)

NONDEGENERACY = "nondegeneracy condition r(v) != 0 violated: det(h_0) = 0"

_probe_lock = threading.Lock()
_probe_cache: dict[tuple[int, int], dict] = {}


def factor_basis(dim: int, degree: int) -> list[tuple]:
    """Basis ``(monomial, a)`` of ``S^degree (x) R^m``: the map ``z -> z^mono e_a``."""
    return [(mono, a) for mono in monomials(dim, degree) for a in range(dim)]


def factor_from_vector(dim: int, degree: int, vec) -> tuple[ScalarJet, ...]:
    comps: list[dict] = [{} for _ in range(dim)]
    for (mono, a), v in zip(factor_basis(dim, degree), vec):
        if v:
            comps[a][mono] = v
    return tuple(ScalarJet(dim, degree, c) for c in comps)


def _unit_form(dim: int, i: int, j: int) -> MetricJet:
    comps = {(i, j): {(0,) * dim: 1}}
    if i != j:
        comps[(j, i)] = {(0,) * dim: 1}
    return MetricJet(dim, 0, comps)


def probe_images(dim: int, n: int) -> dict[tuple, list[TensorJet]]:
    """Slot-n change produced by each factor basis element on each unit form.

    ``images[(i, j)][b]`` is the degree-n slot of ``(E + b) . S_ij`` where
    ``S_ij`` is the constant form with ones at ``(i, j)`` and ``(j, i)``.
    Only ``h_0`` influences the g_{n+1}-dependence of slot n, and that
    dependence is bilinear, so these images determine the system for any
    jet.  Computed once per ``(dim, n)``.
    """
    key = (dim, n)
    with _probe_lock:
        cached = _probe_cache.get(key)
    if cached is not None:
        return cached
    basis = factor_basis(dim, n + 1)
    images: dict[tuple, list[TensorJet]] = {}
    for i in range(dim):
        for j in range(i, dim):
            form = _unit_form(dim, i, j).extend(n)
            row = []
            for t in range(len(basis)):
                e = [int(s == t) for s in range(len(basis))]
                step = elementary_factor(factor_from_vector(dim, n + 1, e), n + 1)
                row.append(act_on_tensor_jet(step, form).homogeneous(n))
            images[(i, j)] = row
    with _probe_lock:
        _probe_cache.setdefault(key, images)
    return images


def probe_directly(current: TensorJet, n: int) -> list[TensorJet]:
    """Uncached probing against the full current jet (slots up to n)."""
    dim = current.dim
    base = current.truncate(n)
    basis = factor_basis(dim, n + 1)
    before = base.homogeneous(n)
    out = []
    for t in range(len(basis)):
        e = [int(s == t) for s in range(len(basis))]
        step = elementary_factor(factor_from_vector(dim, n + 1, e), n + 1)
        out.append(act_on_tensor_jet(step, base).homogeneous(n) - before)
    return out


def linear_response(current: TensorJet, n: int) -> list[TensorJet]:
    """Slot-n response of ``current`` to each factor basis element."""
    h0 = current.h0 if isinstance(current, MetricJet) else [
        [current.component((i, j)).constant_term for j in range(current.dim)] for i in range(current.dim)
    ]
    images = probe_images(current.dim, n)
    nb = len(factor_basis(current.dim, n + 1))
    zero = TensorJet(current.dim, n, (0, 2), {}, "symmetric-covariant")
    out = [zero] * nb
    for (i, j), row in images.items():
        c = h0[i][j]
        if c:
            out = [acc + img.scale(c) for acc, img in zip(out, row)]
    return out


def solve_metric_factor(current: TensorJet, n: int, responses: list[TensorJet] | None = None):
    """The unique ``g_{n+1}`` putting slot ``n`` of ``(E + g_{n+1}) . current`` in place."""
    dim = current.dim
    responses = linear_response(current, n) if responses is None else responses
    slot = current.homogeneous(n)
    if n == 1:
        cols = [metric_slot_to_vector(r, 1) for r in responses]
        rhs = [-v for v in metric_slot_to_vector(slot, 1)]
    else:
        dst = vector_poly_basis(dim, n + 1)
        cols = [tensor_to_vector(delta_n(r, n), dst) for r in responses]
        rhs = [-v for v in tensor_to_vector(delta_n(slot, n), dst)]
    matrix = [[col[r] for col in cols] for r in range(len(rhs))]
    sol = linalg.solve_unique(matrix, rhs)
    return factor_from_vector(dim, n + 1, sol)


@dataclass(frozen=True)
class MetricNormalForm:
    """Normal form of a metric jet and the factors reaching it."""

    h0: tuple[tuple[Fraction, ...], ...]
    invariants: tuple[TensorJet, ...]  # A_2, ..., A_k as homogeneous slots
    normalizer: UnipotentFactors  # g_2, ..., g_{k+1}
    order: int

    @property
    def dim(self) -> int:
        return len(self.h0)

    def invariant(self, n: int) -> TensorJet:
        return self.invariants[n - 2]

    def jet(self) -> MetricJet:
        """The normal-form point: ``(h_0, 0, A_2, ..., A_k)``."""
        m, k = self.dim, self.order
        comps = {
            (i, j): {(0,) * m: self.h0[i][j]} for i in range(m) for j in range(m) if self.h0[i][j]
        }
        for a in self.invariants:
            for idx, c in a.components.items():
                comps.setdefault(idx, {}).update(c.coeffs)
        return MetricJet(m, k, comps)

    def chart(self) -> DiffeoJet:
        return eta_assemble(self.normalizer, self.order + 1)

    def certify(self, h: MetricJet | None = None) -> dict[str, bool]:
        """Re-check the defining properties; with ``h`` also the normalizer."""
        jet = self.jet()
        checks = {
            "slot_1_zero": jet.homogeneous(1).is_zero() if self.order >= 1 else True,
        }
        for n, a in enumerate(self.invariants, start=2):
            checks[f"A_{n}_in_L_{n}"] = kernel_membership(a, "L", n)
        if h is not None:
            checks["normalizer_reproduces_normal_form"] = (
                act_on_tensor_jet(self.chart(), h.truncate(self.order)) == jet
            )
        return checks


def _as_metric(h) -> MetricJet:
    if isinstance(h, MetricJet):
        return h
    if isinstance(h, TensorJet) and h.valence == (0, 2) and h.symmetry == "symmetric-covariant":
        return MetricJet(h.dim, h.order, h.components)
    raise StructuralError("expected a symmetric (0,2) metric jet")


def normalize_metric(h: MetricJet, k: int | None = None) -> MetricNormalForm:
    h = _as_metric(h)
    k = h.order if k is None else k
    if k < 0:
        raise StructuralError(f"normal form order must be non-negative, got {k}")
    if k > h.order:
        raise DomainError(f"normal form of order {k} needs a metric jet of order >= {k} (got {h.order})")
    if not h.is_nondegenerate():
        raise DomainError(NONDEGENERACY)
    current = h.truncate(k)
    terms = []
    for n in range(1, k + 1):
        g = solve_metric_factor(current, n)
        terms.append(g)
        current = act_on_tensor_jet(elementary_factor(g, k + 1), current)
    if k >= 1 and not current.homogeneous(1).is_zero():
        raise InvariantViolation("normalized metric has a nonzero degree-1 slot")
    invariants = tuple(current.homogeneous(n) for n in range(2, k + 1))
    for n, a in enumerate(invariants, start=2):
        if not kernel_membership(a, "L", n):
            raise InvariantViolation(f"normalized slot {n} is not in ker delta_{n}")
    if current.h0 != h.h0:
        raise InvariantViolation("unipotent normalization changed h_0")
    return MetricNormalForm(
        h0=tuple(tuple(row) for row in h.h0),
        invariants=invariants,
        normalizer=UnipotentFactors(h.dim, terms),
        order=k,
    )


@dataclass(frozen=True)
class MetricInvariants:
    det_inverse: Fraction
    h0: tuple[tuple[Fraction, ...], ...]
    curvatures: tuple[TensorJet, ...]  # A_2, ..., A_k

    def as_tuple(self) -> tuple:
        return (self.det_inverse, self.h0, *self.curvatures)


def metric_invariants(h: MetricJet, k: int | None = None) -> MetricInvariants:
    nf = normalize_metric(h, k)
    return MetricInvariants(
        det_inverse=1 / linalg.det(nf.h0),
        h0=nf.h0,
        curvatures=nf.invariants,
    )
