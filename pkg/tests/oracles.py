"""Independent symbolic oracles built on sympy.

Nothing here calls the package's normalizers; the results are converted to
package jets only at the end, for comparison.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import sympy as sp

from jetnormal import ConnectionJet, MetricJet, ScalarJet


def symbols(m: int):
    return sp.symbols(f"z0:{m}")


def truncate(expr, zs, order: int):
    poly = sp.Poly(sp.expand(expr), *zs)
    return sum(
        (c * sp.prod([z**e for z, e in zip(zs, mono)]) for mono, c in poly.terms() if sum(mono) <= order),
        sp.Integer(0),
    )


def to_scalar_jet(expr, zs, order: int) -> ScalarJet:
    poly = sp.Poly(sp.expand(expr), *zs)
    coeffs = {
        tuple(mono): Fraction(int(sp.fraction(c)[0]), int(sp.fraction(c)[1]))
        for mono, c in poly.terms()
        if sum(mono) <= order
    }
    return ScalarJet(len(zs), order, coeffs)


def from_scalar_jet(f: ScalarJet, zs):
    return sum(
        (sp.Rational(v.numerator, v.denominator) * sp.prod([z**e for z, e in zip(zs, mono)]) for mono, v in f.items()),
        sp.Integer(0),
    )


def _radial_series(kind: str, s, terms: int):
    """``cos r`` (or ``cosh``) and ``sin r / r`` (or ``sinh``) as series in ``s = r^2``."""
    sign = -1 if kind == "sphere" else 1
    c = sum((sp.Integer(sign) ** k * s**k / sp.factorial(2 * k) for k in range(terms)), sp.Integer(0))
    sr = sum((sp.Integer(sign) ** k * s**k / sp.factorial(2 * k + 1) for k in range(terms)), sp.Integer(0))
    return c, sr


def space_form_metric(kind: str, m: int, order: int) -> MetricJet:
    """Metric jet of the unit sphere or hyperbolic space in geodesic normal coordinates.

    Built as the pullback of the ambient (Euclidean or Minkowski) metric by
    the exponential map ``z -> cos|z| N + (sin|z|/|z|) z`` of the embedded
    model, with no use of curvature formulas.
    """
    zs = symbols(m)
    s = sum(z**2 for z in zs)
    c, sr = _radial_series(kind, s, order // 2 + 2)
    embedding = [c] + [sr * z for z in zs]
    ambient = [1 if kind == "sphere" else -1] + [1] * m
    comps = {}
    for i, j in product(range(m), repeat=2):
        g = sum(
            (w * sp.diff(x, zs[i]) * sp.diff(x, zs[j]) for w, x in zip(ambient, embedding)),
            sp.Integer(0),
        )
        jet = to_scalar_jet(truncate(g, zs, order), zs, order)
        if not jet.is_zero():
            comps[(i, j)] = jet.coeffs
    return MetricJet(m, order, comps)


def christoffel_jet(h: MetricJet, order: int) -> ConnectionJet:
    """Levi-Civita symbols ``Gamma^l_ij`` of a metric jet, truncated to ``order``.

    Needs ``h.order >= order + 1``.  The inverse metric is a truncated
    symbolic series, not the package's Neumann routine.
    """
    m = h.dim
    zs = symbols(m)
    g = sp.Matrix(m, m, lambda i, j: from_scalar_jet(h.component((i, j)), zs))
    g0 = g.subs({z: 0 for z in zs})
    g0inv = g0.inv()
    nil = g - g0
    ginv = g0inv
    term = g0inv
    for _ in range(order):
        term = sp.expand(-(g0inv * nil) * term)
        ginv = ginv + term
    ginv = ginv.applyfunc(lambda e: truncate(e, zs, order))
    comps = {}
    for l, i, j in product(range(m), repeat=3):
        expr = sum(
            (
                ginv[l, a] * (sp.diff(g[a, j], zs[i]) + sp.diff(g[a, i], zs[j]) - sp.diff(g[i, j], zs[a])) / 2
                for a in range(m)
            ),
            sp.Integer(0),
        )
        jet = to_scalar_jet(truncate(expr, zs, order), zs, order)
        if not jet.is_zero():
            comps[(l, i, j)] = jet.coeffs
    return ConnectionJet(m, order, comps)


def laplace_beltrami_divergence(h: MetricJet, v: ScalarJet) -> Fraction:
    """``|g|^{-1/2} d_i (|g|^{1/2} g^{ij} d_j v)`` at the origin, differentiated symbolically.

    Expanded as ``g^{ij} d_i d_j v + (d_i g^{ij}) d_j v + 1/2 g^{ij} d_i log|g| d_j v``,
    which avoids square roots and is valid for indefinite metrics.
    """
    m = h.dim
    zs = symbols(m)
    at0 = {z: 0 for z in zs}
    g = sp.Matrix(m, m, lambda i, j: from_scalar_jet(h.component((i, j)), zs))
    vv = from_scalar_jet(v, zs)
    g0inv = g.subs(at0).inv()
    total = sp.Integer(0)
    for i in range(m):
        dg = g.diff(zs[i]).subs(at0)
        dginv = -g0inv * dg * g0inv
        dlogdet = (g0inv * dg).trace()
        for j in range(m):
            dv = sp.diff(vv, zs[j]).subs(at0)
            total += g0inv[i, j] * sp.diff(vv, zs[i], zs[j]).subs(at0)
            total += dginv[i, j] * dv
            total += sp.Rational(1, 2) * g0inv[i, j] * dlogdet * dv
    total = sp.nsimplify(total)
    return Fraction(int(sp.fraction(total)[0]), int(sp.fraction(total)[1]))


def moyal_symbolic(omega, f, g, zs, N: int):
    """Moyal coefficients by applying the bidifferential operator to sympy expressions."""
    m = len(zs)
    pairs = [(i, j, sp.Rational(omega[i][j])) for i in range(m) for j in range(m) if omega[i][j]]
    out = [sp.expand(f * g)]
    # terms is a list of (derivative indices on f, derivative indices on g, weight)
    terms = [((), (), sp.Integer(1))]
    for r in range(1, N + 1):
        terms = [(a + (i,), b + (j,), w * c) for a, b, w in terms for i, j, c in pairs]
        acc = sp.Integer(0)
        for a, b, w in terms:
            acc += w * sp.diff(f, *[zs[t] for t in a]) * sp.diff(g, *[zs[t] for t in b])
        out.append(sp.expand(acc / (sp.factorial(r) * 2**r)))
    return out
