"""Natural operations evaluated at the origin through an adapted chart.

A local rule only has to be written for backgrounds already in normal
form.  ``eval_in_adapted_chart`` moves the background and the section into
the adapted chart (metric normal coordinates, or a connection-adapted
chart), applies the rule there and reads the result at the origin.  The
adapted chart has identity linear part, so the value needs no correction.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Protocol, Union, runtime_checkable

from . import linalg
from .connection_normalizer import normalize_connection
from .errors import DomainError, StructuralError
from .jet_algebra import ScalarJet, jet_multiply
from .jet_groups import (
    ConnectionJet,
    DiffeoJet,
    MetricJet,
    TensorJet,
    act_on_connection_jet,
    act_on_scalar_jet,
    act_on_tensor_jet,
)
from .metric_normalizer import NONDEGENERACY, normalize_metric

Section = Union[ScalarJet, TensorJet]


@runtime_checkable
class LocalRule(Protocol):
    """A GL(m)-equivariant rule evaluated on normal-form data at the origin.

    ``order`` is the number of derivatives taken of the section;
    ``background_order`` how far the background must be normalized.
    """

    order: int
    background_order: int

    def __call__(self, background, section): ...


class EvaluationRule:
    """The value of the section at the point."""

    order = 0
    background_order = 0

    def __call__(self, background, section):
        if isinstance(section, ScalarJet):
            return section.constant_term
        return section.at_zero()


class LaplacianRule:
    """``(h_0^{-1})^{ij} d_i d_j v(0)`` for a scalar section in normal coordinates."""

    order = 2
    background_order = 2

    def __call__(self, background, section):
        if not isinstance(background, MetricJet):
            raise StructuralError("the Laplacian needs a metric background")
        if not isinstance(section, ScalarJet):
            raise StructuralError("the Laplacian rule acts on scalar jets")
        hinv = linalg.inverse(background.h0)
        return sum(
            (hinv[i][j] * second_derivative_at_zero(section, i, j)
             for i in range(section.dim) for j in range(section.dim)),
            Fraction(0),
        )


def second_derivative_at_zero(f: ScalarJet, i: int, j: int) -> Fraction:
    mono = tuple(int(t == i) + int(t == j) for t in range(f.dim))
    return f[mono] * (2 if i == j else 1)


def inverse_metric_jet(h: MetricJet) -> TensorJet:
    """The dual form ``h^{-1}`` as a symmetric (2,0)-tensor jet of the same order."""
    if not isinstance(h, MetricJet):
        raise StructuralError("expected a metric jet")
    if not h.is_nondegenerate():
        raise DomainError(NONDEGENERACY)
    m, k = h.dim, h.order
    h0inv = linalg.inverse(h.h0)
    c0 = [[ScalarJet.constant(h0inv[i][j], m, k) for j in range(m)] for i in range(m)]
    # N = H - H_0 (no constant term); H^{-1} = sum_t (-H_0^{-1} N)^t H_0^{-1}
    nil = [[h.component((i, j)) - ScalarJet.constant(h.h0[i][j], m, k) for j in range(m)] for i in range(m)]
    step = _matmul(c0, nil)
    step = [[-c for c in row] for row in step]
    term = c0
    total = c0
    for _ in range(k):
        term = _matmul(step, term)
        total = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(total, term)]
    comps = {(i, j): total[i][j] for i in range(m) for j in range(m)}
    return TensorJet(m, k, (2, 0), comps)


def _matmul(a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ScalarJet._new(a[0][0].dim, a[0][0].order, {})
            for t in range(n):
                if a[i][t].is_zero() or b[t][j].is_zero():
                    continue
                acc = acc + jet_multiply(a[i][t], b[t][j])
            row.append(acc)
        out.append(row)
    return out


def _transport(chart: DiffeoJet, s: Section, order: int) -> Section:
    if s.order < order:
        raise DomainError(f"rule needs a section jet of order >= {order} (got {s.order})")
    chart = chart.truncate(order + 1)
    if isinstance(s, ScalarJet):
        return act_on_scalar_jet(chart, s.truncate(order))
    if isinstance(s, TensorJet):
        return act_on_tensor_jet(chart, s.truncate(order))
    raise StructuralError(f"cannot transport a {type(s).__name__}")


def adapted_background(background, depth: int):
    """Normal form of the background through ``depth`` and its chart."""
    if background.order < depth:
        raise DomainError(
            f"rule needs a background jet of order >= {depth} (got {background.order})"
        )
    if isinstance(background, ConnectionJet):
        nf = normalize_connection(background, depth)
        return nf.jet(), nf.chart()
    if isinstance(background, TensorJet) and background.valence == (0, 2):
        nf = normalize_metric(background, depth)
        return nf.jet(), nf.chart()
    raise StructuralError("background must be a metric jet or a connection jet")


def eval_in_adapted_chart(rule: LocalRule, background, s: Section):
    if background.dim != s.dim:
        raise StructuralError(f"dimension mismatch: {background.dim} vs {s.dim}")
    depth = max(rule.order, getattr(rule, "background_order", 0))
    normal, chart = adapted_background(background, depth)
    return rule(normal, _transport(chart, s, rule.order))


def laplacian_at_point(h: MetricJet, v: ScalarJet) -> Fraction:
    if not isinstance(h, MetricJet):
        raise StructuralError("expected a metric jet")
    if h.order < 2 or v.order < 2:
        raise DomainError("the Laplacian needs metric and function jets of order >= 2")
    if not h.is_nondegenerate():
        raise DomainError(NONDEGENERACY)
    return eval_in_adapted_chart(LaplacianRule(), h, v)


def is_chart_independent(rule: LocalRule, background, s: Section, changes) -> bool:
    """Re-evaluate after each unipotent change of coordinates and compare.

    This is the randomized guard for user rules: a rule that is not
    equivariant generally gives different values in different charts.
    """
    reference = eval_in_adapted_chart(rule, background, s)
    for g in changes:
        if not g.is_unipotent():
            raise DomainError("chart-independence is tested with unipotent changes only")
        if isinstance(background, ConnectionJet):
            moved = act_on_connection_jet(g, background)
        else:
            moved = act_on_tensor_jet(g, background)
        section = act_on_scalar_jet(g, s) if isinstance(s, ScalarJet) else act_on_tensor_jet(g, s)
        if eval_in_adapted_chart(rule, moved, section) != reference:
            return False
    return True
