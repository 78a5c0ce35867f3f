"""Truncated polynomial algebras P(y) = Z_(p)[y_1..y_s]/(y_i^{h_i}).

Degrees are topological (twice the Chow degree).  A monomial is a tuple of
exponents, one per generator, in generator-list order; basis enumeration is
lexicographic in those tuples.
"""

from dataclasses import dataclass, field
from itertools import product

from .linalg import rank_mod_p

MOD_P = "mod_p"
P_LOCAL = "p_local_integers"
PRIMES = (2, 3, 5)


class AlgebraError(ValueError):
    pass


class NotSurjectiveError(AlgebraError):
    """Raised when a generator assignment does not induce a surjection."""

    def __init__(self, degree, rank, target_dim):
        self.degree = degree
        self.rank = rank
        self.target_dim = target_dim
        super().__init__(f"assignment is not surjective in degree {degree}: "
                         f"rank {rank} < target dimension {target_dim}")


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int
    height: int
    aliases: tuple = ()

    def __post_init__(self):
        if self.degree <= 0 or self.degree % 2:
            raise AlgebraError(f"generator {self.name}: degree must be even and positive, got {self.degree}")
        if self.height < 2:
            raise AlgebraError(f"generator {self.name}: height must be at least 2, got {self.height}")


@dataclass(frozen=True)
class AlgebraPresentation:
    prime: int
    generators: tuple = ()
    coefficient_mode: str = P_LOCAL

    def __post_init__(self):
        if self.prime not in PRIMES:
            raise AlgebraError(f"unsupported prime {self.prime}")
        if self.coefficient_mode not in (MOD_P, P_LOCAL):
            raise AlgebraError(f"unknown coefficient mode {self.coefficient_mode!r}")
        object.__setattr__(self, "generators", tuple(self.generators))
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate generator names in {names}")

    @property
    def names(self):
        return [g.name for g in self.generators]

    @property
    def degrees(self):
        return [g.degree for g in self.generators]

    @property
    def heights(self):
        return [g.height for g in self.generators]

    @property
    def dimension(self):
        d = 1
        for h in self.heights:
            d *= h
        return d

    @property
    def top_degree(self):
        return sum((g.height - 1) * g.degree for g in self.generators)

    def index(self, name):
        """Position of a generator, looked up by name or alias."""
        for i, g in enumerate(self.generators):
            if g.name == name or name in g.aliases:
                return i
        raise KeyError(name)

    def monomial_degree(self, mono):
        return sum(e * d for e, d in zip(mono, self.degrees))

    def is_admissible(self, mono):
        return len(mono) == len(self.generators) and all(
            0 <= e < h for e, h in zip(mono, self.heights))

    def unit(self):
        return AlgebraElement(self, {(0,) * len(self.generators): 1})

    def gen(self, name, power=1):
        mono = [0] * len(self.generators)
        mono[self.index(name)] = power
        mono = tuple(mono)
        if not self.is_admissible(mono):
            return AlgebraElement(self, {})
        return AlgebraElement(self, {mono: 1})

    def monomial(self, mono, coeff=1):
        return AlgebraElement(self, {tuple(mono): coeff})

    def format_monomial(self, mono):
        parts = []
        for g, e in zip(self.generators, mono):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) or "1"


@dataclass(frozen=True)
class AlgebraElement:
    """Sparse sum of admissible monomials with integer coefficients."""

    presentation: AlgebraPresentation
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        P = self.presentation
        clean = {}
        for mono, c in self.terms.items():
            mono = tuple(mono)
            if not P.is_admissible(mono):
                if len(mono) == len(P.generators) and all(e >= 0 for e in mono):
                    continue  # truncated to zero
                raise AlgebraError(f"bad exponent vector {mono}")
            if P.coefficient_mode == MOD_P:
                c %= P.prime
            if c:
                clean[mono] = clean.get(mono, 0) + c
        if P.coefficient_mode == MOD_P:
            clean = {m: c % P.prime for m, c in clean.items() if c % P.prime}
        else:
            clean = {m: c for m, c in clean.items() if c}
        object.__setattr__(self, "terms", clean)

    @property
    def degree(self):
        """Common degree of all terms, or None for zero / inhomogeneous."""
        degs = {self.presentation.monomial_degree(m) for m in self.terms}
        return degs.pop() if len(degs) == 1 else None

    @property
    def is_homogeneous(self):
        return len({self.presentation.monomial_degree(m) for m in self.terms}) <= 1

    def is_zero(self):
        return not self.terms

    def _check(self, other):
        if other.presentation != self.presentation:
            raise AlgebraError("elements live over different presentations")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return AlgebraElement(self.presentation, terms)

    def __neg__(self):
        return AlgebraElement(self.presentation, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return AlgebraElement(self.presentation, {m: c * other for m, c in self.terms.items()})
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = self.presentation.unit()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.presentation == other.presentation and self.terms == other.terms

    def __hash__(self):
        return hash((self.presentation, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        P = self.presentation
        out = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mono = P.format_monomial(m)
            if mono == "1":
                out.append(str(c))
            elif c == 1:
                out.append(mono)
            else:
                out.append(f"{c}*{mono}")
        return " + ".join(out)


def basis(P, d):
    """Admissible monomials of degree ``d`` in lexicographic order."""
    if d < 0:
        return []
    out = []

    def rec(i, remaining, prefix):
        if i == len(P.generators):
            if remaining == 0:
                out.append(tuple(prefix))
            return
        g = P.generators[i]
        for e in range(g.height):
            if e * g.degree > remaining:
                break
            prefix.append(e)
            rec(i + 1, remaining - e * g.degree, prefix)
            prefix.pop()

    rec(0, d, [])
    return out


def poincare(P, N=None):
    """Graded dimensions ``[dim P_0, ..., dim P_N]`` (full series by default)."""
    if N is None:
        N = P.top_degree
    series = [1] + [0] * N
    for g in P.generators:
        new = [0] * (N + 1)
        for d, c in enumerate(series):
            if not c:
                continue
            for e in range(g.height):
                k = d + e * g.degree
                if k > N:
                    break
                new[k] += c
        series = new
    return series


def convolve(a, b, N=None):
    """Product of two degree-indexed coefficient lists, truncated at N."""
    if N is None:
        N = len(a) + len(b) - 2
    out = [0] * (N + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if i + j > N:
                break
            out[i + j] += x * y
    return out


def series_from_degrees(degrees, N=None):
    """Coefficient list counting a multiset of degrees."""
    top = max(degrees, default=0)
    if N is None:
        N = top
    out = [0] * (N + 1)
    for d in degrees:
        if d <= N:
            out[d] += 1
    return out


def trim(series):
    s = list(series)
    while len(s) > 1 and s[-1] == 0:
        s.pop()
    return s


def multiply(a, b):
    """Product in P(y); monomials reaching a height are truncated to zero."""
    a._check(b)
    P = a.presentation
    terms = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            if P.is_admissible(m):
                terms[m] = terms.get(m, 0) + ca * cb
    return AlgebraElement(P, terms)


def exterior(prime, specs):
    """Lambda(a, ..., b): each generator has height equal to the prime."""
    return AlgebraPresentation(prime, tuple(GeneratorSpec(n, d, prime) for n, d in specs))


def tensor(P1, P2):
    if P1.prime != P2.prime:
        raise AlgebraError("cannot tensor presentations over different primes")
    clash = set(P1.names) & set(P2.names)
    if clash:
        raise AlgebraError(f"generator name collision: {sorted(clash)}")
    mode = P1.coefficient_mode if P1.coefficient_mode == P2.coefficient_mode else P_LOCAL
    return AlgebraPresentation(P1.prime, P1.generators + P2.generators, mode)


class Homomorphism:
    """Algebra map determined by generator images (missing names map to zero)."""

    def __init__(self, source, target, images):
        self.source = source
        self.target = target
        self.images = {}
        for g in source.generators:
            img = images.get(g.name)
            if img is None:
                img = AlgebraElement(target, {})
            if img.presentation != target:
                raise AlgebraError(f"image of {g.name} is not over the target presentation")
            if not img.is_zero():
                if img.degree != g.degree:
                    raise AlgebraError(
                        f"image of {g.name} has degree {img.degree}, expected {g.degree}")
                if not (img ** g.height).is_zero():
                    raise AlgebraError(f"{g.name}^{g.height} = 0 is not respected by its image")
            self.images[g.name] = img
        unknown = set(images) - set(source.names)
        if unknown:
            raise AlgebraError(f"unknown source generators {sorted(unknown)}")

    def on_monomial(self, mono):
        out = self.target.unit()
        for g, e in zip(self.source.generators, mono):
            if e:
                out = out * (self.images[g.name] ** e)
        return out

    def __call__(self, x):
        return apply_hom(self, x)


def apply_hom(hom, x):
    if x.presentation != hom.source:
        raise AlgebraError("element is not over the source presentation")
    out = AlgebraElement(hom.target, {})
    for mono, c in x.terms.items():
        out = out + hom.on_monomial(mono) * c
    return out


def canonical_surjection(source, target):
    """Generators shared by name map to themselves, the rest to zero."""
    images = {}
    for g in source.generators:
        if g.name in target.names:
            images[g.name] = target.gen(g.name)
    return Homomorphism(source, target, images)


def _rank_in_degree(hom, d):
    src = basis(hom.source, d)
    tgt = basis(hom.target, d)
    index = {m: i for i, m in enumerate(tgt)}
    rows = []
    for m in src:
        img = hom.on_monomial(m)
        row = [0] * len(tgt)
        for mono, c in img.terms.items():
            row[index[mono]] = c
        rows.append(row)
    return len(src), (rank_mod_p(rows, hom.source.prime) if tgt else 0), len(tgt)


def kernel_character(hom, N=None, check_surjective=True):
    """Per-degree dimension of the kernel over F_p."""
    if N is None:
        N = hom.source.top_degree
    out = []
    for d in range(N + 1):
        dim, rank, tdim = _rank_in_degree(hom, d)
        if check_surjective and rank < tdim:
            raise NotSurjectiveError(d, rank, tdim)
        out.append(dim - rank)
    if check_surjective:
        for d in range(N + 1, hom.target.top_degree + 1):
            _, rank, tdim = _rank_in_degree(hom, d)
            if rank < tdim:
                raise NotSurjectiveError(d, rank, tdim)
    return out


def rank_character(hom, N=None):
    if N is None:
        N = hom.source.top_degree
    return [_rank_in_degree(hom, d)[1] for d in range(N + 1)]


def kernel_basis(hom):
    """Monomials spanning the kernel when the map sends monomials to monomials or zero."""
    out = []
    for d in range(hom.source.top_degree + 1):
        for m in basis(hom.source, d):
            if hom.on_monomial(m).is_zero():
                out.append(m)
    return out


def _sub_powers(P, sub_generators):
    powers = {g.name: g.height for g in P.generators}
    for name, power in sub_generators:
        i = P.index(name)
        g = P.generators[i]
        if power < 1 or g.height % power:
            raise AlgebraError(f"power {power} does not divide the height {g.height} of {g.name}")
        powers[g.name] = power
    return powers


def complement_character(P, sub_generators, N=None):
    """Graded dimensions of coset representatives of P over the subalgebra
    generated by ``y_i^{power_i}``.

    Generators not listed contribute nothing to the subalgebra, i.e. their
    power is the full height.
    """
    powers = _sub_powers(P, sub_generators)
    if N is None:
        N = P.top_degree
    Q = AlgebraPresentation(P.prime, tuple(
        GeneratorSpec(g.name, g.degree, powers[g.name]) for g in P.generators if powers[g.name] >= 2))
    return poincare(Q, N)


def subalgebra(P, sub_generators):
    """The subalgebra P(y^J) as a presentation in the powered generators."""
    powers = _sub_powers(P, sub_generators)
    gens = []
    for g in P.generators:
        k = g.height // powers[g.name]
        if k >= 2:
            gens.append(GeneratorSpec(f"{g.name}^{powers[g.name]}" if powers[g.name] > 1 else g.name,
                                      g.degree * powers[g.name], k))
    return AlgebraPresentation(P.prime, tuple(gens), P.coefficient_mode)


def _is_power_of_two(n):
    return n > 0 and n & (n - 1) == 0


def spin_lbar(ell):
    return ell - 1 if _is_power_of_two(ell) else ell


def spin_generators(ell):
    """Generators of gr P(y) for Spin(2*ell+1) at p = 2 (all heights 2)."""
    if ell < 2:
        raise AlgebraError("ell must be at least 2")
    lbar = spin_lbar(ell)
    return [GeneratorSpec(f"y{m}", m, 2) for m in range(2, 2 * lbar + 1, 2)
            if not _is_power_of_two(m)]


def spin_presentation(ell):
    return AlgebraPresentation(2, tuple(spin_generators(ell)))


def all_monomials(P):
    return [tuple(m) for m in product(*(range(h) for h in P.heights))]
