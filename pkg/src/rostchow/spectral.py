"""A small multiplicative spectral-sequence engine over F_2.

E_2 = F_2[rho]/(rho^{S+1}) (x) Lambda(fiber generators), rho in bidegree
(1, 0) and a fiber generator of degree t in bidegree (0, t).  A page is
stored at the chain level: for every bidegree a pair of subspaces
B <= Z of the E_2 piece, the page being Z/B.  A differential d_r is given
on generators and extended to E_2 as a derivation (no signs over F_2).
"""

from dataclasses import dataclass, field

from .algebra import convolve, poincare, trim, AlgebraPresentation

DEFAULT_SMAX = 24


class SpectralError(ValueError):
    pass


class DifferentialError(SpectralError):
    pass


# --- F_2 subspaces of bitmask vectors --------------------------------------------

class F2Space:
    """Subspace of F_2^n; vectors are ints, reduced by leading bit."""

    def __init__(self, vectors=()):
        self.rows = {}   # leading bit -> vector
        for v in vectors:
            self.add(v)

    def reduce(self, v):
        while v:
            top = v.bit_length() - 1
            if top not in self.rows:
                return v
            v ^= self.rows[top]
        return 0

    def add(self, v):
        v = self.reduce(v)
        if v:
            self.rows[v.bit_length() - 1] = v
        return bool(v)

    def __contains__(self, v):
        return self.reduce(v) == 0

    @property
    def dim(self):
        return len(self.rows)

    def basis(self):
        return [self.rows[k] for k in sorted(self.rows)]

    def copy(self):
        s = F2Space()
        s.rows = dict(self.rows)
        return s


def preimage(space_basis, images, target):
    """Subspace of span(space_basis) whose image (given per basis vector) lies in ``target``.

    Gaussian elimination on the pairs (image mod target, source vector).
    """
    pairs = [(target.reduce(img), v) for v, img in zip(space_basis, images)]
    kernel = []
    pivots = {}
    for img, v in pairs:
        while img:
            top = img.bit_length() - 1
            if top not in pivots:
                pivots[top] = (img, v)
                break
            pimg, pv = pivots[top]
            img ^= pimg
            v ^= pv
        if not img:
            kernel.append(v)
    return kernel


# --- E_2 -----------------------------------------------------------------------

@dataclass(frozen=True)
class BigradedAlgebra:
    """F_2[rho]/(rho^{smax+1}) (x) Lambda(fiber generators) with per-bidegree bases."""

    fiber: tuple            # ((name, t-degree), ...)
    smax: int = DEFAULT_SMAX

    def __post_init__(self):
        for name, t in self.fiber:
            if t <= 0:
                raise SpectralError(f"fiber generator {name} needs a positive degree")
        names = [n for n, _ in self.fiber]
        if len(set(names)) != len(names):
            raise SpectralError("duplicate fiber generator names")

    @property
    def names(self):
        return [n for n, _ in self.fiber]

    @property
    def top_fiber_degree(self):
        return sum(t for _, t in self.fiber)

    def mask_degree(self, mask):
        return sum(t for i, (_, t) in enumerate(self.fiber) if mask >> i & 1)

    def fiber_basis(self, t):
        """Exterior monomials (as generator bitmasks) of fiber degree t."""
        return [m for m in range(1 << len(self.fiber)) if self.mask_degree(m) == t]

    def bidegrees(self):
        ts = sorted({self.mask_degree(m) for m in range(1 << len(self.fiber))})
        return [(s, t) for s in range(self.smax + 1) for t in ts]

    def dim(self, s, t):
        if not 0 <= s <= self.smax or t < 0:
            return 0
        return len(self.fiber_basis(t))

    def total_dims(self, N=None):
        if N is None:
            N = self.smax + self.top_fiber_degree
        out = [0] * (N + 1)
        for s, t in self.bidegrees():
            if s + t <= N:
                out[s + t] += self.dim(s, t)
        return out

    def format(self, s, mask):
        parts = [] if s == 0 else (["rho"] if s == 1 else [f"rho^{s}"])
        parts += [n for i, n in enumerate(self.names) if mask >> i & 1]
        return "*".join(parts) or "1"


def e2_page(fiber_degrees, smax=DEFAULT_SMAX):
    """E_2 for fiber generators given as ``{name: degree}`` or ``[(name, degree)]``."""
    items = tuple(fiber_degrees.items()) if isinstance(fiber_degrees, dict) else tuple(fiber_degrees)
    E = BigradedAlgebra(items, smax)
    return Page(E, 2, {bd: (F2Space(_all(E.dim(*bd))), F2Space()) for bd in E.bidegrees()})


def _all(n):
    return [1 << i for i in range(n)]


# elements of E_2 are dicts {(s, mask): 1}, i.e. sets of basis monomials
def _element(E, text_or_terms):
    if isinstance(text_or_terms, (set, frozenset, list, tuple)):
        return set(text_or_terms)
    if isinstance(text_or_terms, str):
        return parse_e2(E, text_or_terms)
    raise SpectralError(f"cannot read {text_or_terms!r} as an E_2 element")


def parse_e2(E, text):
    """``"rho^7"``, ``"rho^3*y6 + y10"``, or ``"0"``."""
    out = set()
    text = text.replace(" ", "")
    if text in ("", "0"):
        return out
    for term in text.split("+"):
        s, mask = 0, 0
        for f in term.split("*"):
            if f == "1":
                continue
            name, _, e = f.partition("^")
            e = int(e) if e else 1
            if name == "rho":
                s += e
            elif name in E.names:
                bit = 1 << E.names.index(name)
                if e > 1 or mask & bit:
                    mask = None
                    break
                mask |= bit
            else:
                raise SpectralError(f"unknown symbol {name!r}")
        if mask is not None and s <= E.smax:
            out ^= {(s, mask)}
    return out


@dataclass
class PageDifferential:
    """d_r on generators; rho is always a cycle."""

    page: int
    images: dict     # fiber generator name -> element (set of (s, mask)) or text

    def normalized(self, E):
        out = {}
        for name, img in self.images.items():
            if name not in E.names:
                raise SpectralError(f"unknown fiber generator {name!r}")
            elem = _element(E, img)
            t = dict(E.fiber)[name]
            for s, mask in elem:
                if (s, E.mask_degree(mask)) != (self.page, t - self.page + 1):
                    raise DifferentialError(
                        f"d_{self.page}({name}) has a term {E.format(s, mask)} outside bidegree "
                        f"({self.page}, {t - self.page + 1})")
            out[name] = elem
        return out

    def on_monomial(self, E, s, mask, images=None):
        """Derivation rule: d(rho^s y_I) = rho^s * sum_j d(y_j) y_{I - j}."""
        images = images if images is not None else self.normalized(E)
        out = set()
        for i, name in enumerate(E.names):
            if not mask >> i & 1 or name not in images:
                continue
            rest = mask & ~(1 << i)
            for s2, m2 in images[name]:
                if m2 & rest or s + s2 > E.smax:
                    continue
                out ^= {(s + s2, m2 | rest)}
        return out


@dataclass
class Page:
    algebra: BigradedAlgebra
    r: int
    spaces: dict                       # (s, t) -> (Z, B)
    history: list = field(default_factory=list)

    def dim(self, s, t):
        if (s, t) not in self.spaces:
            return 0
        Z, B = self.spaces[(s, t)]
        return Z.dim - B.dim

    def total_dims(self, N=None):
        E = self.algebra
        if N is None:
            N = E.smax + E.top_fiber_degree
        out = [0] * (N + 1)
        for (s, t) in self.spaces:
            if s + t <= N:
                out[s + t] += self.dim(s, t)
        return out

    def euler(self):
        return sum((-1) ** (s + t) * self.dim(s, t) for (s, t) in self.spaces)

    def survives(self, s, mask):
        """Does the E_2 monomial rho^s y_mask represent a nonzero class on this page?"""
        E = self.algebra
        t = E.mask_degree(mask)
        if (s, t) not in self.spaces:
            return False
        Z, B = self.spaces[(s, t)]
        v = 1 << E.fiber_basis(t).index(mask)
        return v in Z and v not in B

    def surviving_generators(self):
        E = self.algebra
        out = {"rho": self.survives(1, 0) if E.smax >= 1 else False}
        for i, name in enumerate(E.names):
            out[name] = self.survives(0, 1 << i)
        return out

    def rho_height(self):
        """Smallest k with rho^k zero on this page (None if rho^k survives through the window)."""
        for k in range(self.algebra.smax + 1):
            if not self.survives(k, 0):
                return k
        return None

    def basis_classes(self, s, t):
        E = self.algebra
        Z, B = self.spaces[(s, t)]
        fb = E.fiber_basis(t)
        out = []
        q = B.copy()
        for z in Z.basis():
            if q.add(z):
                out.append(" + ".join(E.format(s, fb[i]) for i in range(len(fb)) if z >> i & 1))
        return out


def d_squared_violations(E, d, limit=None):
    """E_2 monomials of total degree <= limit on which the derivation d satisfies d(d(x)) != 0."""
    images = d.normalized(E)
    limit = E.smax + E.top_fiber_degree if limit is None else limit
    bad = []
    for s in range(E.smax + 1):
        for mask in range(1 << len(E.fiber)):
            if s + E.mask_degree(mask) > limit:
                continue
            twice = set()
            for s2, m2 in d.on_monomial(E, s, mask, images):
                twice ^= d.on_monomial(E, s2, m2, images)
            if twice:
                bad.append((s, mask))
    return bad


def _apply(page, d, images, s, t, vec):
    """Image of an E_2 vector of bidegree (s, t) as a vector in bidegree (s+r, t-r+1)."""
    E = page.algebra
    src = E.fiber_basis(t)
    tt = t - d.page + 1
    tgt = {m: i for i, m in enumerate(E.fiber_basis(tt))} if tt >= 0 else {}
    out = 0
    for i, mask in enumerate(src):
        if vec >> i & 1:
            for s2, m2 in d.on_monomial(E, s, mask, images):
                out ^= 1 << tgt[m2]
    return out


def turn_page(page, d):
    """E_{r+1} = H(E_r, d_r), with the checks that make d_r a differential on E_r."""
    E = page.algebra
    if d.page != page.r:
        raise DifferentialError(f"page E_{page.r} cannot take d_{d.page}")
    images = d.normalized(E)
    r = d.page
    new = {}
    images_in = {bd: F2Space() for bd in page.spaces}
    ranks = {}
    for (s, t), (Z, B) in page.spaces.items():
        tgt = (s + r, t - r + 1)
        zb = Z.basis()
        if tgt not in page.spaces:
            # target outside the window or negative fiber degree: d_r is zero here
            new[(s, t)] = (Z.copy(), None)
            ranks[(s, t)] = 0
            continue
        Zt, Bt = page.spaces[tgt]
        dz = [_apply(page, d, images, s, t, z) for z in zb]
        for z, img in zip(zb, dz):
            if img not in Zt:
                raise DifferentialError(f"d_{r} of a cycle in ({s},{t}) is not a cycle in {tgt}")
        for b in B.basis():
            if _apply(page, d, images, s, t, b) not in Bt:
                raise DifferentialError(f"d_{r} does not send boundaries in ({s},{t}) to boundaries")
        # d^2 = 0 modulo boundaries
        tgt2 = (s + 2 * r, t - 2 * r + 2)
        if tgt2 in page.spaces:
            B2 = page.spaces[tgt2][1]
            for img in dz:
                if _apply(page, d, images, tgt[0], tgt[1], img) not in B2:
                    raise DifferentialError(f"d_{r} o d_{r} is nonzero on ({s},{t})")
        cycles = preimage(zb, dz, Bt)
        Znew = F2Space(cycles)
        Znew_full = Znew.copy()
        for b in B.basis():
            Znew_full.add(b)
        new[(s, t)] = (Znew_full, None)
        before = Bt.dim
        span = Bt.copy()
        for img in dz:
            span.add(img)
            images_in[tgt].add(img)
        ranks[(s, t)] = span.dim - before
    spaces = {}
    for bd, (Znew, _) in new.items():
        Bold = page.spaces[bd][1].copy()
        for v in images_in[bd].basis():
            Bold.add(v)
        spaces[bd] = (Znew, Bold)
    out = Page(E, r + 1, spaces, page.history + [(r, {k: sorted(v) for k, v in images.items()})])
    _check_rank_identity(page, out, r, ranks)
    return out


def _check_rank_identity(before, after, r, ranks):
    """dim E_{r+1} = dim E_r - rank(d out) - rank(d in), bidegree by bidegree."""
    for (s, t) in before.spaces:
        incoming = ranks.get((s - r, t + r - 1), 0)
        if after.dim(s, t) != before.dim(s, t) - ranks[(s, t)] - incoming:
            raise SpectralError(f"rank identity fails at ({s},{t})")


@dataclass
class Certificate:
    status: str                 # stable | inconclusive
    first_page: int             # the page that is E_infinity in the window
    window: int                 # certified for total degrees <= window
    checked_pages: tuple
    witness: tuple = None       # (r, source bidegree, target bidegree) blocking the certificate

    def to_json(self):
        return {"status": self.status, "stable_page": self.first_page, "window": self.window,
                "checked_pages": list(self.checked_pages), "witness": self.witness}


def certify(page):
    """Show every later differential vanishes for total degree <= smax - 2.

    For r > page.r a differential d_r: (s, t) -> (s + r, t - r + 1) can only
    be nonzero when both ends are nonzero on the page, and it needs
    t - r + 1 >= 0, so r <= top fiber degree + 1 bounds the pages to inspect.
    Truncating the rho-tower only creates spurious classes in total degree
    >= smax, so sources up to smax - 2 see honest targets.
    """
    E = page.algebra
    limit = E.smax - 2
    top = E.top_fiber_degree
    pages = tuple(range(page.r, top + 2))
    blocked = None
    for r in pages:
        for (s, t) in sorted(page.spaces, key=lambda b: (b[0] + b[1], b)):
            if s + t > limit or not page.dim(s, t):
                continue
            tgt = (s + r, t - r + 1)
            if tgt[1] >= 0 and page.dim(*tgt):
                if blocked is None or s + t < blocked[1][0] + blocked[1][1]:
                    blocked = (r, (s, t), tgt)
    if blocked is None:
        return Certificate("stable", page.r, limit, pages)
    n = blocked[1][0] + blocked[1][1]
    return Certificate("inconclusive", page.r, n - 1, pages, blocked)


def run_to_stable(e2, differentials, smax=None):
    """Apply the given differentials page by page, then certify stability.

    ``differentials`` maps a page number r to ``{generator: image}``; pages
    without an entry get the zero differential.  ``e2`` is a Page or a
    fiber-degree specification.
    """
    page = e2 if isinstance(e2, Page) else e2_page(e2, smax or DEFAULT_SMAX)
    ds = {r: (d if isinstance(d, PageDifferential) else PageDifferential(r, d)) for r, d in differentials.items()}
    last = max(ds, default=1)
    eulers = [page.euler()]
    while page.r <= last:
        d = ds.get(page.r, PageDifferential(page.r, {}))
        page = turn_page(page, d)
        eulers.append(page.euler())
    if len(set(eulers)) != 1:
        raise SpectralError(f"Euler characteristic changed across pages: {eulers}")
    return page, certify(page)


def spin7_window_character(N):
    """Dims 1 in degrees 0..6: the answer for the Spin_7 motive over the reals."""
    return [1 if d <= 6 else 0 for d in range(N + 1)]


def real_character(entry, N=None):
    """Spin_7 answer (x) P(y)/(y_6), with P(y) the entry's presentation."""
    if entry.prime != 2:
        raise SpectralError("the real-field character needs p = 2")
    P = entry.presentation()
    six = [g for g in P.generators if g.degree == 6]
    if not six:
        raise SpectralError(f"{entry.label} has no generator of degree 6")
    Q = AlgebraPresentation(2, tuple(g for g in P.generators if g.degree != 6))
    if N is None:
        N = 6 + Q.top_degree
    return convolve(spin7_window_character(N), poincare(Q, N), N)


def real_fiber(entry):
    """Fiber generators of the complex points at gr level: one per generator of P(y).

    The étale cohomology of the split motive is the exterior algebra on the
    generators of gr P(y); heights other than 2 are not supported here.
    """
    P = entry.presentation()
    if any(h != 2 for h in P.heights):
        raise SpectralError(f"{entry.label} has generators of height > 2; no exterior fiber model")
    return tuple((g.name, g.degree) for g in P.generators)


def real_differentials(entry):
    """d_7(y6) = rho^7 and every other generator a permanent cycle."""
    fiber = real_fiber(entry)
    six = [n for n, t in fiber if t == 6]
    if not six:
        raise SpectralError(f"{entry.label} has no generator of degree 6")
    return {7: {six[0]: "rho^7"}}


def run_real(entry, smax=DEFAULT_SMAX):
    return run_to_stable(real_fiber(entry), real_differentials(entry), smax)


def window_dims(page, cert):
    return trim(page.total_dims(cert.window))
