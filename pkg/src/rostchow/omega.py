"""Submodules of Omega_m (x) P(y) and their augmentation quotients.

Omega_m = Z_(p)[v_1, ..., v_m] with |v_i| = -2(p^i - 1).  A submodule is
given by homogeneous generators; at a fixed degree d it is a finitely
generated lattice spanned by the v-multiples of generators that land in d.
The quotient by (v_1, ..., v_m) is the Chow-group side of the story.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import AlgebraError, basis
from .linalg import echelon_basis, in_row_lattice, smith_normal_form, solve_in_basis, vecmat

DEFAULT_VBOUND = 3


class OmegaError(ValueError):
    pass


class PrimeToPTorsionError(OmegaError):
    pass


class NotInModuleError(OmegaError):
    pass


class IncompleteDataError(OmegaError):
    pass


def v_degree(p, i):
    return -2 * (p ** i - 1)


def v_exponents(p, m, drop):
    """All v-exponent vectors whose degree is exactly ``-drop``."""
    if drop < 0:
        return []
    weights = [-v_degree(p, i) for i in range(1, m + 1)]
    out = []

    def rec(i, remaining, prefix):
        if i == m:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        w = weights[i]
        e = 0
        while e * w <= remaining:
            prefix.append(e)
            rec(i + 1, remaining - e * w, prefix)
            prefix.pop()
            e += 1

    rec(0, drop, [])
    return out


@dataclass(frozen=True)
class OmegaAmbient:
    """Omega_m (x) P(y) for a fixed presentation and v-bound."""

    presentation: object
    vbound: int = DEFAULT_VBOUND

    @property
    def prime(self):
        return self.presentation.prime

    def pair_degree(self, vexp, mono):
        p = self.prime
        return self.presentation.monomial_degree(mono) + sum(
            e * v_degree(p, i + 1) for i, e in enumerate(vexp))

    def pair_basis(self, d):
        """Ambient basis of degree d as sorted (v-exponents, monomial) pairs."""
        out = []
        P = self.presentation
        for e in range(max(d, 0), P.top_degree + 1):
            monos = basis(P, e)
            if not monos:
                continue
            for a in v_exponents(self.prime, self.vbound, e - d):
                out.extend((a, m) for m in monos)
        return sorted(out)

    def element(self, terms):
        return OmegaElement(self, terms)

    def zero(self):
        return OmegaElement(self, {})

    def one(self):
        return OmegaElement(self, {((0,) * self.vbound, (0,) * len(self.presentation.generators)): 1})

    def v(self, i, power=1):
        if not 1 <= i <= self.vbound:
            raise OmegaError(f"v{i} exceeds the v-bound {self.vbound}")
        a = [0] * self.vbound
        a[i - 1] = power
        return OmegaElement(self, {(tuple(a), (0,) * len(self.presentation.generators)): 1})

    def from_algebra(self, x):
        return OmegaElement(self, {((0,) * self.vbound, m): c for m, c in x.terms.items()})

    def with_vbound(self, m):
        return OmegaAmbient(self.presentation, m)


@dataclass(frozen=True)
class OmegaElement:
    ambient: OmegaAmbient
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        A = self.ambient
        P = A.presentation
        clean = {}
        for (a, mono), c in self.terms.items():
            a, mono = tuple(a), tuple(mono)
            if len(a) != A.vbound:
                raise OmegaError(f"v-exponent vector {a} does not have length {A.vbound}")
            if len(mono) != len(P.generators) or any(e < 0 for e in mono):
                raise AlgebraError(f"bad exponent vector {mono}")
            if not P.is_admissible(mono):
                continue
            if c:
                clean[(a, mono)] = clean.get((a, mono), 0) + c
        object.__setattr__(self, "terms", {k: c for k, c in clean.items() if c})
        degs = {A.pair_degree(a, m) for a, m in self.terms}
        if len(degs) > 1:
            raise OmegaError(f"inhomogeneous element with degrees {sorted(degs)}")

    @property
    def degree(self):
        for a, m in self.terms:
            return self.ambient.pair_degree(a, m)
        return None

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if other.ambient != self.ambient:
            raise OmegaError("elements live in different ambients")
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return OmegaElement(self.ambient, terms)

    def __neg__(self):
        return OmegaElement(self.ambient, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return OmegaElement(self.ambient, {k: c * other for k, c in self.terms.items()})
        if other.ambient != self.ambient:
            raise OmegaError("elements live in different ambients")
        P = self.ambient.presentation
        terms = {}
        for (a, m), c in self.terms.items():
            for (b, n), d in other.terms.items():
                mono = tuple(x + y for x, y in zip(m, n))
                if not P.is_admissible(mono):
                    continue
                key = (tuple(x + y for x, y in zip(a, b)), mono)
                terms[key] = terms.get(key, 0) + c * d
        return OmegaElement(self.ambient, terms)

    __rmul__ = __mul__

    def vector(self, keys):
        index = {k: i for i, k in enumerate(keys)}
        out = [0] * len(keys)
        for k, c in self.terms.items():
            out[index[k]] = c
        return out

    def __eq__(self, other):
        if not isinstance(other, OmegaElement):
            return NotImplemented
        return self.ambient == other.ambient and self.terms == other.terms

    def __hash__(self):
        return hash((self.ambient, frozenset(self.terms.items())))

    def __repr__(self):
        return format_omega(self)


def format_omega(x):
    if x.is_zero():
        return "0"
    P = x.ambient.presentation
    out = []
    for (a, m) in sorted(x.terms):
        c = x.terms[(a, m)]
        factors = []
        for i, e in enumerate(a):
            if e == 1:
                factors.append(f"v{i + 1}")
            elif e > 1:
                factors.append(f"v{i + 1}^{e}")
        mono = P.format_monomial(m)
        if mono != "1":
            factors.append(mono)
        if c != 1 or not factors:
            factors.insert(0, str(c))
        out.append("*".join(factors))
    return " + ".join(out).replace("+ -", "- ")


@dataclass(frozen=True)
class GradedAbelianGroup:
    """Per-degree free rank and p-power torsion orders."""

    prime: int
    pieces: dict = field(default_factory=dict)   # degree -> (free, tuple of orders)
    names: dict = field(default_factory=dict)    # degree -> tuple of class names

    def __post_init__(self):
        clean = {}
        for d, (free, tors) in self.pieces.items():
            tors = tuple(sorted(t for t in tors if t != 1))
            for t in tors:
                if not _is_power_of(t, self.prime):
                    raise PrimeToPTorsionError(f"torsion order {t} in degree {d} is not a power of {self.prime}")
            if free or tors:
                clean[d] = (free, tors)
        object.__setattr__(self, "pieces", dict(sorted(clean.items())))

    def free_rank(self, d):
        return self.pieces.get(d, (0, ()))[0]

    def torsion(self, d):
        return self.pieces.get(d, (0, ()))[1]

    def p_rank(self, d):
        free, tors = self.pieces.get(d, (0, ()))
        return free + len(tors)

    def total_p_rank(self):
        return sum(self.p_rank(d) for d in self.pieces)

    def degrees(self):
        return sorted(self.pieces)

    def p_rank_series(self, N=None):
        if N is None:
            N = max(self.pieces, default=0)
        return [self.p_rank(d) for d in range(N + 1)]

    def mod_p(self):
        return GradedAbelianGroup(self.prime, {d: (0, (self.prime,) * self.p_rank(d)) for d in self.pieces},
                                  dict(self.names))

    def tensor_free(self, series):
        """Tensor with a free graded Z_(p)-module given by its Poincare series."""
        pieces = {}
        for d, (free, tors) in self.pieces.items():
            for e, k in enumerate(series):
                if not k:
                    continue
                f0, t0 = pieces.get(d + e, (0, ()))
                pieces[d + e] = (f0 + k * free, t0 + tors * k)
        return GradedAbelianGroup(self.prime, pieces)

    def same_groups(self, other):
        return self.prime == other.prime and self.pieces == other.pieces

    def describe(self, d):
        free, tors = self.pieces.get(d, (0, ()))
        parts = ["Z"] * free + [f"Z/{t}" for t in tors]
        return " + ".join(parts) or "0"

    def to_json(self):
        return {str(d): {"free": f, "torsion": list(t), "names": list(self.names.get(d, ()))}
                for d, (f, t) in self.pieces.items()}


def _is_power_of(n, p):
    while n > 1 and n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class OmegaSubmodule:
    ambient: OmegaAmbient
    generators: tuple
    complete: bool = True

    def __post_init__(self):
        gens = list(self.generators)
        for g in gens:
            if g.ambient != self.ambient:
                raise OmegaError("generator lives in a different ambient")
            if g.is_zero():
                raise OmegaError("zero generator")
            if g.degree < 0:
                raise OmegaError(f"generator {g} has negative degree")
        if self.ambient.one() not in gens:
            gens.insert(0, self.ambient.one())
        object.__setattr__(self, "generators", tuple(gens))

    @property
    def prime(self):
        return self.ambient.prime

    def with_vbound(self, m):
        A = self.ambient.with_vbound(m)
        gens = []
        for g in self.generators:
            terms = {}
            for (a, mono), c in g.terms.items():
                if any(a[m:]):
                    raise OmegaError(f"generator {g} uses v-variables beyond v{m}")
                terms[(tuple(a[:m]) + (0,) * max(0, m - len(a)), mono)] = c
            gens.append(OmegaElement(A, terms))
        return OmegaSubmodule(A, tuple(gens), self.complete)

    def top_degree(self):
        return max(g.degree for g in self.generators)


def from_ideal_data(ambient, pairs, complete=True):
    """Submodule generated by 1 and ``ideal_gen * monomial`` for every pair.

    ``pairs`` holds ``(ideal_generators, monomial)`` where each ideal
    generator is ``(coefficient, v_exponents)`` and ``monomial`` an exponent
    tuple of the presentation.
    """
    gens = []
    for ideal, mono in pairs:
        for coeff, vexp in ideal:
            vexp = tuple(vexp)
            if len(vexp) > ambient.vbound and any(vexp[ambient.vbound:]):
                raise OmegaError(f"v-variable index exceeds the v-bound {ambient.vbound}")
            vexp = vexp[:ambient.vbound] + (0,) * (ambient.vbound - len(vexp))
            if not ambient.presentation.is_admissible(tuple(mono)):
                raise OmegaError(f"monomial {mono} is not admissible")
            gens.append(OmegaElement(ambient, {(vexp, tuple(mono)): coeff}))
    return OmegaSubmodule(ambient, tuple(gens), complete)


def graded_piece(M, d):
    """Rows (v-multiples of generators of degree d) and the ambient pair basis.

    Returns ``(rows, keys, tags)`` where ``tags[i] = (generator index,
    v-exponents)`` records which multiple produced row i.
    """
    A = M.ambient
    keys = A.pair_basis(d)
    rows, tags = [], []
    for gi, g in enumerate(M.generators):
        drop = g.degree - d
        for a in v_exponents(A.prime, A.vbound, drop):
            va = OmegaElement(A, {(a, (0,) * len(A.presentation.generators)): 1})
            x = va * g
            if x.is_zero():
                continue
            rows.append(x.vector(keys))
            tags.append((gi, a))
    return rows, keys, tags


def contains(M, x):
    """p-local membership of the homogeneous element x in M."""
    if x.ambient != M.ambient:
        raise OmegaError("element lives in a different ambient")
    if x.is_zero():
        return True
    rows, keys, _ = graded_piece(M, x.degree)
    return in_row_lattice(rows, x.vector(keys), M.prime)


def submodule_contains(M, others, x):
    """Membership of x in the submodule generated by ``others`` (plus 1)."""
    return contains(OmegaSubmodule(M.ambient, tuple(others), M.complete), x)


def saturate_products(M, N=None):
    """Close the generators under pairwise products up to degree N, then prune."""
    if N is None:
        N = M.ambient.presentation.top_degree
    gens = list(M.generators)
    frontier = list(range(len(gens)))
    while frontier:
        new = []
        for i in frontier:
            for j in range(len(gens)):
                prod = gens[i] * gens[j]
                if prod.is_zero() or prod.degree > N:
                    continue
                if not submodule_contains(M, gens, prod):
                    gens.append(prod)
                    new.append(len(gens) - 1)
        frontier = new
    one = M.ambient.one()
    kept = list(gens)
    for g in list(gens):
        if g == one:
            continue
        others = [h for h in kept if h is not g]
        if submodule_contains(M, others, g):
            kept = others
    return OmegaSubmodule(M.ambient, tuple(kept), M.complete)


@dataclass
class QuotientPiece:
    """Degree-d piece of M / (v_1, ..., v_m) M with Smith coordinates."""

    degree: int
    prime: int
    keys: list
    lattice: list          # echelon Z-basis of M_d
    pivots: list
    V: list                # Smith column transform on lattice coordinates
    invariants: list       # Smith invariants of the decomposable sublattice (unit ones included)
    lattice_rank: int
    relation_rank: int

    @property
    def torsion(self):
        return [d for d in self.invariants if d != 1]

    @property
    def free_rank(self):
        return self.lattice_rank - self.relation_rank

    @property
    def unit_invariants(self):
        return sum(1 for d in self.invariants if d == 1)

    def coordinates(self, vector):
        """Class of an ambient vector: residues for torsion slots, then free coordinates."""
        z = solve_in_basis(self.lattice, self.pivots, vector)
        if z is None:
            raise NotInModuleError("vector is not in the rational span of the piece")
        for c in z:
            if Fraction(c).denominator % self.prime == 0:
                raise NotInModuleError("vector needs a denominator divisible by p")
        w = vecmat(z, self.V, self.lattice_rank)
        out = []
        for i, d in enumerate(self.invariants):
            if d == 1:
                continue
            out.append(_mod(w[i], d))
        out.extend(Fraction(c) for c in w[len(self.invariants):])
        return tuple(out)

    def slot_orders(self):
        """Order of each coordinate slot (0 for free slots)."""
        return tuple(self.torsion) + (0,) * self.free_rank


def _mod(c, d):
    c = Fraction(c)
    return (c.numerator * pow(c.denominator, -1, d)) % d


def quotient_piece(M, d):
    rows, keys, tags = graded_piece(M, d)
    n = len(keys)
    lattice, pivots = echelon_basis(rows, n)
    r = len(lattice)
    decomposable = [row for row, (_, a) in zip(rows, tags) if any(a)]
    coords = []
    for row in decomposable:
        z = solve_in_basis(lattice, pivots, row)
        coords.append([int(c) for c in z])
    _, D, V = smith_normal_form(coords, r)
    invariants = [D[i][i] for i in range(min(len(D), r)) if D[i][i]]
    for t in invariants:
        if t != 1 and not _is_power_of(t, M.prime):
            raise PrimeToPTorsionError(
                f"Smith invariant {t} in degree {d} has a factor prime to {M.prime}")
    return QuotientPiece(d, M.prime, keys, lattice, pivots, V, invariants, r, len(invariants))


def quotient_degrees(M, N=None):
    """Degrees where M/(v)M can be nonzero: those of generators, capped at N."""
    degs = sorted({g.degree for g in M.generators})
    if N is not None:
        degs = [d for d in degs if d <= N]
    return degs


def augmentation_quotient(M, N=None, allow_incomplete=False):
    """M (x)_{Omega} Z_(p) as a graded abelian group, degrees 0..N."""
    if not M.complete and not allow_incomplete:
        raise IncompleteDataError("restriction data is marked incomplete; refusing to compute the quotient")
    if N is None:
        N = M.ambient.presentation.top_degree
    pieces = {}
    for d in range(min(0, *quotient_degrees(M)), N + 1):
        q = quotient_piece(M, d)
        if q.lattice_rank:
            pieces[d] = (q.free_rank, tuple(q.torsion))
    return GradedAbelianGroup(M.prime, pieces)


def class_of(M, x):
    """Coordinates of x in the Smith presentation of the quotient at deg(x).

    Raises NotInModuleError when x is not in M; a zero class is a tuple of
    zeros (empty for a zero quotient).
    """
    if x.is_zero():
        return ()
    if not contains(M, x):
        raise NotInModuleError(f"{x} is not in the module")
    q = quotient_piece(M, x.degree)
    return q.coordinates(x.vector(q.keys))


def class_is_zero(cls, p=None):
    """Zero test; with p given, after reduction mod p (every slot order is a power of p)."""
    if p is None:
        return all(c == 0 for c in cls)
    return all(_mod(c, p) == 0 for c in cls)


def reduce_class(cls, p):
    return tuple(_mod(c, p) for c in cls)
