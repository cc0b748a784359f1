"""Jets of diffeomorphisms fixing the origin and their actions on jets.

Convention: a diffeomorphism jet ``g`` is the coordinate change from old
coordinates ``x`` to new coordinates ``y = g(x)``.  It acts on a section
jet by pushing it forward,

    (g . v)(y) = rho(J_g(x)) v(x),   x = g^{-1}(y),

so that ``act(g o h, v) == act(g, act(h, v))``.  Contravariant indices are
transformed by ``J_g(x)``, covariant indices by ``J_{g^{-1}}(y)``.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import DomainError, StructuralError
from .jet_algebra import (
    ScalarJet,
    Substitution,
    as_rational,
    grlex_key,
    jet_multiply,
    jet_partial,
    unit,
)

SYMMETRY_TAGS = ("none", "symmetric-covariant", "antisymmetric-contravariant")


# ---------------------------------------------------------------------------
# diffeomorphism jets


class DiffeoJet:
    """``order``-jet of a germ of diffeomorphism of (R^m, 0)."""

    __slots__ = ("dim", "order", "components")

    def __init__(self, components: Sequence[ScalarJet], *, check: bool = True):
        comps = tuple(components)
        if not comps:
            raise StructuralError("a diffeomorphism jet needs at least one component")
        dim, order = comps[0].dim, comps[0].order
        if len(comps) != dim:
            raise StructuralError(f"{len(comps)} components given for dimension {dim}")
        for c in comps:
            if c.dim != dim or c.order != order:
                raise StructuralError("components must share dimension and order")
            if c.constant_term:
                raise DomainError("diffeomorphism jet must fix the origin (g(0) = 0)")
        if order < 1:
            raise StructuralError("diffeomorphism jets have order >= 1")
        self.dim = dim
        self.order = order
        self.components = comps
        if check and linalg.det(self.linear_part()) == 0:
            raise DomainError("linear part of the diffeomorphism jet is singular")

    @classmethod
    def identity(cls, dim: int, order: int) -> "DiffeoJet":
        return cls([ScalarJet.variable(i, dim, order) for i in range(dim)], check=False)

    @classmethod
    def linear(cls, matrix: Sequence[Sequence], order: int = 1) -> "DiffeoJet":
        """The jet of ``z -> matrix @ z``."""
        dim = len(matrix)
        comps = [
            ScalarJet(dim, order, {unit(dim, i): as_rational(matrix[a][i]) for i in range(dim)})
            for a in range(dim)
        ]
        return cls(comps)

    def linear_part(self) -> list[list[Fraction]]:
        """Jacobi matrix at the origin, ``L[a][i] = d g^a / d z^i (0)``."""
        return [[c[unit(self.dim, i)] for i in range(self.dim)] for c in self.components]

    def is_unipotent(self) -> bool:
        return self.linear_part() == linalg.identity(self.dim)

    def truncate(self, order: int) -> "DiffeoJet":
        if order < 1:
            raise StructuralError("diffeomorphism jets have order >= 1")
        if order == self.order:
            return self
        return DiffeoJet([c.truncate(order) for c in self.components], check=False)

    def extend(self, order: int) -> "DiffeoJet":
        return DiffeoJet([c.extend(order) for c in self.components], check=False)

    def jacobian(self) -> list[list[ScalarJet]]:
        """``J[a][i] = d g^a / d z^i`` as jets of order ``order - 1``."""
        return [[jet_partial(c, i) for i in range(self.dim)] for c in self.components]

    def homogeneous(self, degree: int) -> tuple[ScalarJet, ...]:
        return tuple(c.homogeneous(degree) for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, DiffeoJet):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        body = ", ".join(str(c) for c in self.components)
        return f"DiffeoJet(order={self.order}, [{body}])"

    def __matmul__(self, other: "DiffeoJet") -> "DiffeoJet":
        return diffeo_compose(self, other)


def diffeo_compose(g: DiffeoJet, h: DiffeoJet) -> DiffeoJet:
    """``g o h`` (apply ``h`` first), truncated to the smaller order."""
    if g.dim != h.dim:
        raise StructuralError(f"dimension mismatch: {g.dim} vs {h.dim}")
    order = min(g.order, h.order)
    sub = Substitution(h.components, order)
    return DiffeoJet([sub.apply(c.truncate(order)) for c in g.components], check=False)


def diffeo_invert(g: DiffeoJet) -> DiffeoJet:
    lin = g.linear_part()
    try:
        lin_inv = linalg.inverse(lin)
    except DomainError:
        raise DomainError("cannot invert a diffeomorphism jet with singular linear part") from None
    dim, r = g.dim, g.order
    # G = L^{-1} o g is unipotent; iterate H <- z - (G - id)(H)
    comps = [
        sum((c.scale(lin_inv[a][b]) for b, c in enumerate(g.components)), ScalarJet.zero(dim, r))
        for a in range(dim)
    ]
    ident = [ScalarJet.variable(i, dim, r) for i in range(dim)]
    nonlinear = [c - ident[a] for a, c in enumerate(comps)]
    h = ident
    for _ in range(r - 1):
        sub = Substitution(h, r)
        h = [ident[a] - sub.apply(nonlinear[a]) for a in range(dim)]
    lin_map = [
        ScalarJet(dim, r, {unit(dim, i): lin_inv[a][i] for i in range(dim)}) for a in range(dim)
    ]
    sub = Substitution(lin_map, r)
    return DiffeoJet([sub.apply(c) for c in h], check=False)


class UnipotentFactors:
    """Homogeneous factors ``(g_2, ..., g_r)`` of a unipotent jet.

    ``terms[i]`` is ``g_{i+2}``: a tuple of ``dim`` homogeneous polynomials of
    degree ``i + 2``.  The assembled jet is ``(E + g_r) o ... o (E + g_2)``
    and has order ``r``.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Iterable[Sequence[ScalarJet]] = ()):
        self.dim = dim
        clean = []
        for i, term in enumerate(terms):
            degree = i + 2
            term = tuple(term)
            if len(term) != dim:
                raise StructuralError(f"factor g_{degree} needs {dim} components")
            hom = []
            for c in term:
                if c.dim != dim:
                    raise StructuralError("factor component has wrong dimension")
                if c.degrees() - {degree}:
                    raise StructuralError(f"factor g_{degree} is not homogeneous of degree {degree}")
                hom.append(ScalarJet._new(dim, degree, dict(c._c)))
            clean.append(tuple(hom))
        self.terms = tuple(clean)

    @property
    def order(self) -> int:
        return len(self.terms) + 1

    def factor(self, degree: int) -> tuple[ScalarJet, ...]:
        return self.terms[degree - 2]

    def is_identity(self) -> bool:
        return all(c.is_zero() for term in self.terms for c in term)

    def assemble(self) -> DiffeoJet:
        return eta_assemble(self)

    def __eq__(self, other):
        if not isinstance(other, UnipotentFactors):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __repr__(self):
        parts = [f"g{i + 2}=({', '.join(map(str, t))})" for i, t in enumerate(self.terms)]
        return f"UnipotentFactors({'; '.join(parts)})"


def elementary_factor(term: Sequence[ScalarJet], order: int) -> DiffeoJet:
    """The jet of ``z -> z + g_n(z)`` at the given order."""
    dim = len(term)
    return DiffeoJet(
        [ScalarJet.variable(a, dim, order) + c.extend(order).truncate(order) for a, c in enumerate(term)],
        check=False,
    )


def eta_assemble(factors: UnipotentFactors, order: int | None = None) -> DiffeoJet:
    order = factors.order if order is None else order
    result = DiffeoJet.identity(factors.dim, order)
    for degree, term in enumerate(factors.terms, start=2):
        if degree > order:
            break
        result = diffeo_compose(elementary_factor(term, order), result)
    return result


def eta_factorize(n: DiffeoJet) -> UnipotentFactors:
    if not n.is_unipotent():
        raise DomainError("only jets with identity linear part factor into unipotent terms")
    r = n.order
    terms = []
    rest = n
    for degree in range(2, r + 1):
        term = rest.homogeneous(degree)
        terms.append(term)
        rest = diffeo_compose(rest, diffeo_invert(elementary_factor(term, r)))
    return UnipotentFactors(n.dim, terms)


# ---------------------------------------------------------------------------
# tensor-valued jets


def _index_tuples(dim: int, rank: int):
    return product(range(dim), repeat=rank)


class _IndexedJet:
    """Shared storage: a map from index tuples to scalar jets."""

    __slots__ = ("dim", "order", "_comp")
    rank: int

    def _init_components(self, dim: int, order: int, rank: int, components) -> None:
        if not isinstance(dim, int) or dim < 1:
            raise StructuralError(f"dimension must be a positive integer, got {dim!r}")
        if not isinstance(order, int) or order < 0:
            raise StructuralError(f"order must be a non-negative integer, got {order!r}")
        comp: dict[tuple, ScalarJet] = {}
        for idx, val in dict(components).items():
            idx = tuple(idx)
            if len(idx) != rank or any(not (isinstance(i, int) and 0 <= i < dim) for i in idx):
                raise StructuralError(f"index tuple {idx!r} invalid for rank {rank}, dimension {dim}")
            if not isinstance(val, ScalarJet):
                val = ScalarJet(dim, order, val)
            if val.dim != dim or val.order != order:
                raise StructuralError(
                    f"component {idx} has dim/order ({val.dim}, {val.order}), expected ({dim}, {order})"
                )
            if not val.is_zero():
                comp[idx] = val
        self.dim = dim
        self.order = order
        self._comp = comp

    def component(self, idx: Sequence[int]) -> ScalarJet:
        c = self._comp.get(tuple(idx))
        return c if c is not None else ScalarJet._new(self.dim, self.order, {})

    __getitem__ = component

    @property
    def components(self) -> dict[tuple, ScalarJet]:
        return dict(self._comp)

    def entries(self) -> list[tuple[tuple, tuple, Fraction]]:
        """``(multi_index, indices, value)`` triples in a canonical order."""
        out = []
        for idx in sorted(self._comp):
            for mono, v in self._comp[idx].items():
                out.append((mono, idx, v))
        out.sort(key=lambda e: (grlex_key(e[0]), e[1]))
        return out

    def is_zero(self) -> bool:
        return not self._comp

    def at_zero(self) -> dict[tuple, Fraction]:
        """The fiber value at the origin (nonzero components only)."""
        out = {}
        for idx, c in self._comp.items():
            v = c.constant_term
            if v:
                out[idx] = v
        return out

    def _map(self, fn) -> dict:
        comp = {}
        for idx, c in self._comp.items():
            c2 = fn(c)
            if not c2.is_zero():
                comp[idx] = c2
        return comp

    def _same_shape(self, other) -> None:
        if type(self) is not type(other) and not (
            isinstance(self, TensorJet) and isinstance(other, TensorJet)
        ):
            raise StructuralError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if self.dim != other.dim or self.order != other.order:
            raise StructuralError("dimension or order mismatch")

    def __eq__(self, other):
        if not isinstance(other, _IndexedJet):
            return NotImplemented
        return (
            self._signature() == other._signature()
            and self.dim == other.dim
            and self.order == other.order
            and self._comp == other._comp
        )

    def __hash__(self):
        return hash((self._signature(), self.dim, self.order, frozenset(self._comp.items())))

    def _signature(self):
        return (self.rank,)


class TensorJet(_IndexedJet):
    """Jet of a tensor field with ``valence = (p, q)``.

    Index tuples list the ``p`` contravariant indices first, then the ``q``
    covariant ones.  A symmetric covariant 2-tensor ``h`` corresponds to the
    quadratic form ``sum_ij h_ij u^i u^j``.
    """

    __slots__ = ("valence", "symmetry")

    def __init__(
        self,
        dim: int,
        order: int,
        valence: tuple[int, int],
        components: Mapping = (),
        symmetry: str = "none",
    ):
        p, q = valence
        if p < 0 or q < 0:
            raise StructuralError(f"invalid valence {valence!r}")
        if symmetry not in SYMMETRY_TAGS:
            raise StructuralError(f"unknown symmetry tag {symmetry!r}")
        if symmetry == "symmetric-covariant" and tuple(valence) != (0, 2):
            raise StructuralError("symmetric-covariant tag requires valence (0, 2)")
        if symmetry == "antisymmetric-contravariant" and tuple(valence) != (2, 0):
            raise StructuralError("antisymmetric-contravariant tag requires valence (2, 0)")
        self.valence = (p, q)
        self.symmetry = symmetry
        self._init_components(dim, order, p + q, components)
        self._check_symmetry()

    @property
    def rank(self) -> int:
        return sum(self.valence)

    def _signature(self):
        return (self.valence, self.symmetry)

    def _check_symmetry(self) -> None:
        if self.symmetry == "none":
            return
        sign = 1 if self.symmetry == "symmetric-covariant" else -1
        for (i, j), c in list(self._comp.items()):
            if self.component((j, i)) != c.scale(sign):
                kind = "symmetric" if sign == 1 else "antisymmetric"
                raise StructuralError(
                    f"symmetry violation: components ({i},{j}) and ({j},{i}) are not {kind}"
                )

    @classmethod
    def from_entries(cls, dim, order, valence, entries, symmetry="none") -> "TensorJet":
        """Build from ``{(multi_index, indices): value}``."""
        comps: dict[tuple, dict] = {}
        for (mono, idx), v in dict(entries).items():
            comps.setdefault(tuple(idx), {})[tuple(mono)] = v
        return cls(dim, order, valence, comps, symmetry)

    def _like(self, comp: dict, order: int | None = None) -> "TensorJet":
        obj = object.__new__(type(self))
        obj.dim = self.dim
        obj.order = self.order if order is None else order
        obj.valence = self.valence
        obj.symmetry = self.symmetry
        obj._comp = comp
        return obj

    def truncate(self, order: int) -> "TensorJet":
        if order == self.order:
            return self
        return self._like(self._map(lambda c: c.truncate(order)), order)

    def extend(self, order: int) -> "TensorJet":
        return self._like(self._map(lambda c: c.extend(order)), order)

    def homogeneous(self, degree: int) -> "TensorJet":
        """Degree-``degree`` Taylor slot, as a jet of order ``degree``."""
        return self._like(self._map(lambda c: c.homogeneous(degree)), degree)

    def __add__(self, other):
        if not isinstance(other, TensorJet):
            return NotImplemented
        self._same_shape(other)
        comp = dict(self._comp)
        for idx, c in other._comp.items():
            s = comp[idx] + c if idx in comp else c
            if s.is_zero():
                comp.pop(idx, None)
            else:
                comp[idx] = s
        return self._like(comp)

    def __neg__(self):
        return self._like(self._map(lambda c: -c))

    def __sub__(self, other):
        if not isinstance(other, TensorJet):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "TensorJet":
        return self._like(self._map(lambda c: c.scale(s)))

    def as_tensor(self) -> "TensorJet":
        return TensorJet(self.dim, self.order, self.valence, self._comp, self.symmetry)

    def __repr__(self):
        return (
            f"{type(self).__name__}(dim={self.dim}, order={self.order}, "
            f"valence={self.valence}, {len(self._comp)} nonzero components)"
        )


class MetricJet(TensorJet):
    """Jet of a symmetric covariant 2-tensor, ``h = h_0 + h_1 + ... + h_k``."""

    __slots__ = ()

    def __init__(self, dim: int, order: int, components: Mapping = ()):
        super().__init__(dim, order, (0, 2), components, "symmetric-covariant")

    @classmethod
    def from_entries(cls, dim, order, entries, *_ignored) -> "MetricJet":
        comps: dict[tuple, dict] = {}
        for (mono, idx), v in dict(entries).items():
            comps.setdefault(tuple(idx), {})[tuple(mono)] = v
        return cls(dim, order, comps)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence], order: int = 0) -> "MetricJet":
        """Metric jet whose entries are jets (or constants) given as a matrix."""
        dim = len(matrix)
        comps = {}
        for i in range(dim):
            for j in range(dim):
                v = matrix[i][j]
                comps[(i, j)] = v if isinstance(v, ScalarJet) else ScalarJet.constant(v, dim, order)
        return cls(dim, order, comps)

    @property
    def h0(self) -> list[list[Fraction]]:
        return [[self.component((i, j)).constant_term for j in range(self.dim)] for i in range(self.dim)]

    def is_nondegenerate(self) -> bool:
        return linalg.det(self.h0) != 0


class PoissonJet(TensorJet):
    """Jet of an antisymmetric contravariant 2-tensor ``omega^{ij}``."""

    __slots__ = ()

    def __init__(self, dim: int, order: int, components: Mapping = ()):
        super().__init__(dim, order, (2, 0), components, "antisymmetric-contravariant")

    @classmethod
    def from_entries(cls, dim, order, entries, *_ignored) -> "PoissonJet":
        comps: dict[tuple, dict] = {}
        for (mono, idx), v in dict(entries).items():
            comps.setdefault(tuple(idx), {})[tuple(mono)] = v
        return cls(dim, order, comps)

    @classmethod
    def constant(cls, matrix: Sequence[Sequence], order: int = 0) -> "PoissonJet":
        dim = len(matrix)
        return cls(
            dim,
            order,
            {(i, j): ScalarJet.constant(matrix[i][j], dim, order) for i in range(dim) for j in range(dim)},
        )

    def matrix_at_zero(self) -> list[list[Fraction]]:
        return [[self.component((i, j)).constant_term for j in range(self.dim)] for i in range(self.dim)]


class ConnectionJet(_IndexedJet):
    """Jet of Christoffel symbols ``theta^l_{ij}(z)``.

    Index tuples are ``(l, i, j)``: output, derivative direction, argument,
    i.e. ``nabla_{d_i} d_j = theta^l_{ij} d_l``.  No symmetry is imposed.
    """

    __slots__ = ()
    rank = 3

    def __init__(self, dim: int, order: int, components: Mapping = ()):
        self._init_components(dim, order, 3, components)

    def _signature(self):
        return ("connection",)

    @classmethod
    def from_entries(cls, dim, order, entries) -> "ConnectionJet":
        comps: dict[tuple, dict] = {}
        for (mono, idx), v in dict(entries).items():
            comps.setdefault(tuple(idx), {})[tuple(mono)] = v
        return cls(dim, order, comps)

    @classmethod
    def zero(cls, dim: int, order: int) -> "ConnectionJet":
        return cls(dim, order)

    def _like(self, comp: dict, order: int | None = None) -> "ConnectionJet":
        obj = object.__new__(ConnectionJet)
        obj.dim = self.dim
        obj.order = self.order if order is None else order
        obj._comp = comp
        return obj

    def truncate(self, order: int) -> "ConnectionJet":
        if order == self.order:
            return self
        return self._like(self._map(lambda c: c.truncate(order)), order)

    def extend(self, order: int) -> "ConnectionJet":
        return self._like(self._map(lambda c: c.extend(order)), order)

    def homogeneous(self, degree: int) -> "ConnectionJet":
        return self._like(self._map(lambda c: c.homogeneous(degree)), degree)

    def __add__(self, other):
        if not isinstance(other, ConnectionJet):
            return NotImplemented
        self._same_shape(other)
        comp = dict(self._comp)
        for idx, c in other._comp.items():
            s = comp[idx] + c if idx in comp else c
            if s.is_zero():
                comp.pop(idx, None)
            else:
                comp[idx] = s
        return self._like(comp)

    def __neg__(self):
        return self._like(self._map(lambda c: -c))

    def __sub__(self, other):
        if not isinstance(other, ConnectionJet):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "ConnectionJet":
        return self._like(self._map(lambda c: c.scale(s)))

    def as_tensor(self) -> TensorJet:
        """The same components viewed as a (1, 2)-tensor jet."""
        return TensorJet(self.dim, self.order, (1, 2), self._comp)

    @classmethod
    def from_tensor(cls, t: TensorJet) -> "ConnectionJet":
        if t.valence != (1, 2):
            raise StructuralError("a connection jet needs valence (1, 2)")
        return cls(t.dim, t.order, t.components)

    def symmetric_part(self) -> "ConnectionJet":
        return self._pair_part(1)

    def antisymmetric_part(self) -> "ConnectionJet":
        return self._pair_part(-1)

    def _pair_part(self, sign: int) -> "ConnectionJet":
        half = Fraction(1, 2)
        comp = {}
        for l, i, j in _index_tuples(self.dim, 3):
            c = (self.component((l, i, j)) + self.component((l, j, i)).scale(sign)).scale(half)
            if not c.is_zero():
                comp[(l, i, j)] = c
        return self._like(comp)

    def __repr__(self):
        return f"ConnectionJet(dim={self.dim}, order={self.order}, {len(self._comp)} nonzero components)"


# ---------------------------------------------------------------------------
# actions


class _Frame:
    """Data of a coordinate change needed to transport jets to ``order``.

    Holds the inverse ``x = g^{-1}(y)``, ``A = J_{g^{-1}}(y)`` and
    ``J = J_g(g^{-1}(y))``, all as jets in ``y``.
    """

    def __init__(self, g: DiffeoJet, order: int, extra: int = 0):
        need = order + 1 + extra
        if g.order < need:
            raise DomainError(
                f"diffeomorphism jet of order {g.order} is too short: order {need} needed "
                f"to act on jets of order {order}"
            )
        g = g.truncate(need)
        self.dim = g.dim
        self.order = order
        ginv = diffeo_invert(g)
        self.inverse = ginv
        self.sub = Substitution(ginv.components, order)
        a_full = ginv.jacobian()  # order need - 1 = order + extra
        self.A_full = a_full
        self.A = [[c.truncate(order) for c in row] for row in a_full]
        jac_g = g.jacobian()
        self.J = [[self.sub.apply(c.truncate(order)) for c in row] for row in jac_g]

    def push_scalar(self, f: ScalarJet) -> ScalarJet:
        return self.sub.apply(f.truncate(self.order))

    def push_components(self, comp: Mapping[tuple, ScalarJet], valence: tuple[int, int]) -> dict:
        cur = {idx: self.sub.apply(c.truncate(self.order)) for idx, c in comp.items()}
        p, q = valence
        for pos in range(p + q):
            cur = _contract(cur, pos, self.J if pos < p else self.A, contravariant=pos < p, dim=self.dim)
        return cur


def _contract(comp: dict, pos: int, mat, contravariant: bool, dim: int) -> dict:
    """Transform one index: contravariant ``T^a = M[a][c] T^c``, covariant ``T_b = T_d M[d][b]``."""
    out: dict[tuple, ScalarJet] = {}
    for idx, c in comp.items():
        k = idx[pos]
        for a in range(dim):
            m = mat[a][k] if contravariant else mat[k][a]
            if m.is_zero():
                continue
            term = jet_multiply(m, c)
            key = idx[:pos] + (a,) + idx[pos + 1:]
            prev = out.get(key)
            out[key] = term if prev is None else prev + term
    return {k: v for k, v in out.items() if not v.is_zero()}


def act_on_scalar_jet(g: DiffeoJet, f: ScalarJet) -> ScalarJet:
    """Push a function jet forward: ``(g . f)(y) = f(g^{-1}(y))``."""
    if g.dim != f.dim:
        raise StructuralError(f"dimension mismatch: {g.dim} vs {f.dim}")
    return _Frame(g, f.order).push_scalar(f)


def act_on_tensor_jet(g: DiffeoJet, t: TensorJet) -> TensorJet:
    if isinstance(t, ScalarJet):
        return act_on_scalar_jet(g, t)
    if not isinstance(t, TensorJet):
        raise StructuralError(f"expected a TensorJet, got {type(t).__name__}")
    if g.dim != t.dim:
        raise StructuralError(f"dimension mismatch: {g.dim} vs {t.dim}")
    frame = _Frame(g, t.order)
    return t._like(frame.push_components(t._comp, t.valence))


def act_on_connection_jet(g: DiffeoJet, theta: ConnectionJet) -> ConnectionJet:
    """Transition rule for Christoffel symbols under ``y = g(x)``:

        theta'^l_ij(y) = J^l_a ( d_i A^a_j + A^c_i theta^a_cb(x) A^b_j )

    with ``A = J_{g^{-1}}(y)`` and ``J = A^{-1}``.
    """
    if not isinstance(theta, ConnectionJet):
        raise StructuralError(f"expected a ConnectionJet, got {type(theta).__name__}")
    if g.dim != theta.dim:
        raise StructuralError(f"dimension mismatch: {g.dim} vs {theta.dim}")
    k, dim = theta.order, theta.dim
    frame = _Frame(g, k, extra=1)
    comp = frame.push_components(theta._comp, (1, 2))
    for l, i, j in _index_tuples(dim, 3):
        acc = None
        for a in range(dim):
            jla = frame.J[l][a]
            if jla.is_zero():
                continue
            d = jet_partial(frame.A_full[a][j], i)
            if d.is_zero():
                continue
            term = jet_multiply(jla, d)
            acc = term if acc is None else acc + term
        if acc is None:
            continue
        prev = comp.get((l, i, j))
        total = acc if prev is None else prev + acc
        if total.is_zero():
            comp.pop((l, i, j), None)
        else:
            comp[(l, i, j)] = total
    return theta._like(comp)


def eval_at_zero(t):
    """Fiber value at the origin: a rational for scalar jets, else a component dict."""
    if isinstance(t, ScalarJet):
        return t.constant_term
    return t.at_zero()
