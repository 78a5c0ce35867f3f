"""Catalog entries and the line-oriented catalog file format.

Grammar (one item per line, blank lines separate entries, ``#`` lines are
comments)::

    [entry <group> p=<p>]
    flag <gr-level|res-incomplete|chow-mod-p|inclusion-only>
    gen <name> deg=<d> h=<h> [alias=<a>,<b>...]
    edge <subgroup> labels=<m1>,<m2>...|- convention=<tensor|kernel>
    res (<ideal gens>)<monomial> [incomplete]
    class <name> deg=<d> -> <omega-element> [known-inconsistent] [corrected=<omega-element>]
    chow <deg>: free=<r> tors=<t1>,<t2>...|- names=<n1>,...|-
    restrict <subgroup> <class> -> <expression> [integral]
    bideg <class> rho=<b> tau=<a>
    assert <text>

Dumping a parsed canonical file reproduces it byte for byte.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..algebra import AlgebraPresentation, GeneratorSpec, spin_lbar
from ..omega import DEFAULT_VBOUND, GradedAbelianGroup, OmegaAmbient, OmegaElement, from_ideal_data

FLAGS = ("gr-level", "res-incomplete", "chow-mod-p", "inclusion-only")
CONVENTIONS = {"tensor": "tensor_factor", "kernel": "kernel_basis"}
BUNDLED = Path(__file__).with_name("catalog.txt")


class CatalogError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Gen:
    name: str
    degree: int
    height: int
    aliases: tuple = ()

    def dump(self):
        s = f"gen {self.name} deg={self.degree} h={self.height}"
        if self.aliases:
            s += " alias=" + ",".join(self.aliases)
        return s


@dataclass(frozen=True)
class Edge:
    target: str
    labels: tuple
    convention: str   # tensor_factor | kernel_basis

    def dump(self):
        short = {v: k for k, v in CONVENTIONS.items()}[self.convention]
        return f"edge {self.target} labels={','.join(self.labels) or '-'} convention={short}"


@dataclass(frozen=True)
class ResLine:
    ideal: tuple      # strings such as "2", "v1^2", "3v1"
    monomial: str
    incomplete: bool = False

    def dump(self):
        s = f"res ({','.join(self.ideal)}){self.monomial}"
        return s + " incomplete" if self.incomplete else s


@dataclass(frozen=True)
class NamedClass:
    name: str
    degree: int
    image: str
    known_inconsistent: bool = False
    corrected: str = None

    @property
    def working_image(self):
        """The image used for computation: the corrected one when present."""
        return self.corrected or self.image

    def dump(self):
        s = f"class {self.name} deg={self.degree} -> {self.image}"
        if self.known_inconsistent:
            s += " known-inconsistent"
        if self.corrected:
            s += f" corrected={self.corrected}"
        return s


@dataclass(frozen=True)
class ChowLine:
    degree: int
    free: int
    torsion: tuple
    names: tuple

    def dump(self):
        tors = ",".join(str(t) for t in self.torsion) or "-"
        return f"chow {self.degree}: free={self.free} tors={tors} names={','.join(self.names) or '-'}"


@dataclass(frozen=True)
class Restriction:
    target: str
    cls: str
    expression: str
    integral: bool = False

    def dump(self):
        s = f"restrict {self.target} {self.cls} -> {self.expression}"
        return s + " integral" if self.integral else s


@dataclass(frozen=True)
class Bidegree:
    cls: str
    rho: int
    tau: int

    @property
    def motivic(self):
        """Bidegree of tau^tau rho^rho with |rho| = (1,1) and |tau| = (0,1)."""
        return (self.rho, self.rho + self.tau)

    def dump(self):
        return f"bideg {self.cls} rho={self.rho} tau={self.tau}"


@dataclass(frozen=True)
class Flag:
    name: str

    def dump(self):
        return f"flag {self.name}"


@dataclass(frozen=True)
class Assertion:
    text: str

    def dump(self):
        return f"assert {self.text}"


@dataclass(frozen=True)
class Blank:
    def dump(self):
        return ""


@dataclass(frozen=True)
class Comment:
    text: str

    def dump(self):
        return self.text


@dataclass
class CatalogEntry:
    group: str
    prime: int
    items: list = field(default_factory=list)
    # degrees of names defined elsewhere in the catalog at the same prime;
    # only used to read verbatim data that mentions foreign generators
    foreign_symbols: dict = field(default_factory=dict, compare=False, repr=False)

    # --- views -------------------------------------------------------------
    def _of(self, kind):
        return [x for x in self.items if isinstance(x, kind)]

    @property
    def key(self):
        return (self.group, self.prime)

    @property
    def label(self):
        return f"{self.group} p={self.prime}"

    @property
    def flags(self):
        return {f.name for f in self._of(Flag)}

    @property
    def gens(self):
        return self._of(Gen)

    @property
    def edges(self):
        return self._of(Edge)

    @property
    def res_lines(self):
        return self._of(ResLine)

    @property
    def classes(self):
        return self._of(NamedClass)

    @property
    def chow_lines(self):
        return self._of(ChowLine)

    @property
    def restrictions(self):
        return self._of(Restriction)

    @property
    def bidegrees(self):
        return self._of(Bidegree)

    @property
    def assertions(self):
        return [a.text for a in self._of(Assertion)]

    @property
    def gr_level(self):
        return "gr-level" in self.flags

    @property
    def res_complete(self):
        return "res-incomplete" not in self.flags and not any(r.incomplete for r in self.res_lines)

    @property
    def chow_mod_p(self):
        return "chow-mod-p" in self.flags

    @property
    def inclusion_only(self):
        return "inclusion-only" in self.flags

    def named_class(self, name):
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(f"{self.label} has no class named {name!r}")

    @property
    def spin_ell(self):
        m = re.fullmatch(r"Spin_(\d+)", self.group)
        if not m or int(m.group(1)) % 2 == 0:
            return None
        return (int(m.group(1)) - 1) // 2

    @property
    def spin_lbar(self):
        ell = self.spin_ell
        return None if ell is None else spin_lbar(ell)

    # --- algebra -----------------------------------------------------------
    def presentation(self):
        return AlgebraPresentation(self.prime, tuple(
            GeneratorSpec(g.name, g.degree, g.height, g.aliases) for g in self.gens))

    def ambient(self, vbound=DEFAULT_VBOUND):
        return OmegaAmbient(self.presentation(), vbound)

    def symbol_degrees(self):
        table = dict(self.foreign_symbols)
        for g in self.gens:
            table[g.name] = g.degree
            for a in g.aliases:
                table[a] = g.degree
        return table

    def parse_omega(self, text, vbound=DEFAULT_VBOUND, ambient=None):
        A = ambient or self.ambient(vbound)
        return omega_from_text(A, text)

    def res_pairs(self, presentation=None):
        P = presentation or self.presentation()
        pairs = []
        for r in self.res_lines:
            mono = parse_monomial(P, r.monomial)
            pairs.append(([parse_ideal_generator(g) for g in r.ideal], mono))
        return pairs

    def res_module(self, vbound=DEFAULT_VBOUND):
        A = self.ambient(vbound)
        return from_ideal_data(A, self.res_pairs(A.presentation), complete=self.res_complete)

    def expected_chow(self):
        pieces, names = {}, {}
        for c in self.chow_lines:
            pieces[c.degree] = (c.free, tuple(c.torsion))
            names[c.degree] = tuple(c.names)
        return GradedAbelianGroup(self.prime, pieces, names)

    def lines(self):
        return [f"[entry {self.group} p={self.prime}]"] + [item.dump() for item in self.items]

    def dump(self):
        """The entry on its own, without surrounding blank lines."""
        lines = self.lines()
        while lines and not lines[-1]:
            lines.pop()
        return "\n".join(lines) + "\n"


# --- expression parsing ------------------------------------------------------

FACTOR = re.compile(r"(?P<coef>\d+)?(?:(?P<name>[A-Za-z][A-Za-z0-9_']*)(?:\^(?P<exp>\d+))?)?$")
VVAR = re.compile(r"v(\d+)$")


def parse_terms(text):
    """Split ``2*v1*y6 - y10`` into ``[(coef, [(name, exp), ...]), ...]``."""
    text = text.replace(" ", "")
    if not text:
        raise CatalogError("empty expression")
    terms = []
    for sign, body in re.findall(r"([+-]?)([^+-]+)", text):
        coef = -1 if sign == "-" else 1
        factors = []
        for f in body.split("*"):
            m = FACTOR.match(f)
            if not f or not m:
                raise CatalogError(f"cannot parse factor {f!r} in {text!r}")
            if m.group("coef"):
                coef *= int(m.group("coef"))
            if m.group("name"):
                factors.append((m.group("name"), int(m.group("exp") or 1)))
            elif m.group("exp"):
                raise CatalogError(f"dangling exponent in {f!r}")
        terms.append((coef, factors))
    rebuilt = "".join(s + b for s, b in re.findall(r"([+-]?)([^+-]+)", text))
    if rebuilt != text:
        raise CatalogError(f"cannot parse expression {text!r}")
    return terms


def parse_ideal_generator(text):
    """``"3v1^2"`` -> ``(3, (2,))``; coefficient defaults to 1."""
    terms = parse_terms(text)
    if len(terms) != 1:
        raise CatalogError(f"ideal generator {text!r} must be a single monomial")
    coef, factors = terms[0]
    vexp = {}
    for name, e in factors:
        m = VVAR.match(name)
        if not m:
            raise CatalogError(f"ideal generator {text!r} may only involve v-variables")
        vexp[int(m.group(1))] = vexp.get(int(m.group(1)), 0) + e
    top = max(vexp, default=0)
    return coef, tuple(vexp.get(i, 0) for i in range(1, top + 1))


def parse_monomial(P, text):
    terms = parse_terms(text)
    if len(terms) != 1 or terms[0][0] != 1:
        raise CatalogError(f"{text!r} is not a monomial")
    mono = [0] * len(P.generators)
    for name, e in terms[0][1]:
        try:
            mono[P.index(name)] += e
        except KeyError:
            raise CatalogError(f"unknown generator {name!r}") from None
    return tuple(mono)


def omega_from_text(A, text):
    P = A.presentation
    out = A.zero()
    for coef, factors in parse_terms(text):
        a = [0] * A.vbound
        mono = [0] * len(P.generators)
        for name, e in factors:
            m = VVAR.match(name)
            if m:
                i = int(m.group(1))
                if not 1 <= i <= A.vbound:
                    raise CatalogError(f"v{i} exceeds the v-bound {A.vbound}")
                a[i - 1] += e
                continue
            try:
                mono[P.index(name)] += e
            except KeyError:
                raise CatalogError(f"unknown generator {name!r} in {text!r}") from None
        out = out + OmegaElement(A, {(tuple(a), tuple(mono)): coef})
    return out


def expression_degree(text, symbols, prime):
    """Degree of a homogeneous expression from a name -> degree table."""
    degs = set()
    for _, factors in parse_terms(text):
        d = 0
        for name, e in factors:
            m = VVAR.match(name)
            if m:
                d += -2 * (prime ** int(m.group(1)) - 1) * e
            elif name in symbols:
                d += symbols[name] * e
            else:
                raise CatalogError(f"unresolvable name {name!r} in {text!r}")
        degs.add(d)
    if len(degs) != 1:
        raise CatalogError(f"{text!r} is not homogeneous")
    return degs.pop()


# --- file format -------------------------------------------------------------

HEADER = re.compile(r"\[entry (\S+) p=(\d+)\]$")


def _kv(tokens, line_no, required, optional=()):
    out = {}
    for t in tokens:
        if "=" not in t:
            raise CatalogError(f"expected key=value, got {t!r}", line_no)
        k, v = t.split("=", 1)
        if k not in required and k not in optional:
            raise CatalogError(f"unknown field {k!r}", line_no)
        out[k] = v
    missing = [k for k in required if k not in out]
    if missing:
        raise CatalogError(f"missing field(s) {missing}", line_no)
    return out


def _int(text, line_no):
    try:
        return int(text)
    except ValueError:
        raise CatalogError(f"expected an integer, got {text!r}", line_no) from None


def _list(text):
    return () if text == "-" else tuple(text.split(","))


def parse_line(line, line_no):
    head, _, rest = line.partition(" ")
    if head == "flag":
        if rest not in FLAGS:
            raise CatalogError(f"unknown flag {rest!r}", line_no)
        return Flag(rest)
    if head == "gen":
        name, *kv = rest.split()
        f = _kv(kv, line_no, ("deg", "h"), ("alias",))
        return Gen(name, _int(f["deg"], line_no), _int(f["h"], line_no),
                   tuple(f["alias"].split(",")) if "alias" in f else ())
    if head == "edge":
        target, *kv = rest.split()
        f = _kv(kv, line_no, ("labels", "convention"))
        if f["convention"] not in CONVENTIONS:
            raise CatalogError(f"unknown convention {f['convention']!r}", line_no)
        return Edge(target, _list(f["labels"]), CONVENTIONS[f["convention"]])
    if head == "res":
        m = re.fullmatch(r"\(([^)]*)\)(\S+)( incomplete)?", rest)
        if not m:
            raise CatalogError(f"malformed res line {rest!r}", line_no)
        ideal = tuple(m.group(1).split(","))
        for g in ideal:
            parse_ideal_generator(g)
        return ResLine(ideal, m.group(2), bool(m.group(3)))
    if head == "class":
        m = re.fullmatch(r"(\S+) deg=(-?\d+) -> (.+?)( known-inconsistent)?( corrected=(\S+))?", rest)
        if not m:
            raise CatalogError(f"malformed class line {rest!r}", line_no)
        parse_terms(m.group(3))
        if m.group(6):
            parse_terms(m.group(6))
        return NamedClass(m.group(1), int(m.group(2)), m.group(3), bool(m.group(4)), m.group(6))
    if head == "chow":
        m = re.fullmatch(r"(\d+): (.*)", rest)
        if not m:
            raise CatalogError(f"malformed chow line {rest!r}", line_no)
        f = _kv(m.group(2).split(), line_no, ("free", "tors", "names"))
        tors = tuple(_int(t, line_no) for t in _list(f["tors"]))
        names = _list(f["names"])
        free = _int(f["free"], line_no)
        if names and len(names) != free + len(tors):
            raise CatalogError("number of names does not match the group rank", line_no)
        return ChowLine(int(m.group(1)), free, tors, names)
    if head == "restrict":
        m = re.fullmatch(r"(\S+) (\S+) -> (.+?)( integral)?", rest)
        if not m:
            raise CatalogError(f"malformed restrict line {rest!r}", line_no)
        parse_terms(m.group(3))
        return Restriction(m.group(1), m.group(2), m.group(3), bool(m.group(4)))
    if head == "bideg":
        name, *kv = rest.split()
        f = _kv(kv, line_no, ("rho", "tau"))
        return Bidegree(name, _int(f["rho"], line_no), _int(f["tau"], line_no))
    if head == "assert":
        if not rest:
            raise CatalogError("empty assertion", line_no)
        return Assertion(rest)
    raise CatalogError(f"unknown line type {head!r}", line_no)


@dataclass
class Catalog:
    entries: list
    header: list = field(default_factory=list)   # comment and blank lines before the first entry
    trailing_newline: bool = True

    def get(self, group, prime=None):
        hits = [e for e in self.entries if e.group == group and (prime is None or e.prime == prime)]
        if not hits:
            raise KeyError((group, prime))
        if len(hits) > 1:
            raise KeyError(f"{group} exists at several primes {[e.prime for e in hits]}; give -p")
        return hits[0]

    def groups(self):
        return sorted({e.group for e in self.entries})

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def dump(self):
        lines = list(self.header)
        for e in self.entries:
            lines.extend(e.lines())
        if not lines:
            return ""
        return "\n".join(lines) + ("\n" if self.trailing_newline else "")


def parse_catalog(text):
    header, entries = [], []
    current = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line:
            if current is None:
                header.append("")
            else:
                current.items.append(Blank())
            continue
        if line.startswith("#"):
            if current is None:
                header.append(line)
            else:
                current.items.append(Comment(line))
            continue
        m = HEADER.match(line)
        if m:
            p = int(m.group(2))
            if p not in (2, 3, 5):
                raise CatalogError(f"unsupported prime {p}", line_no)
            current = CatalogEntry(m.group(1), p)
            if any(e.key == current.key for e in entries):
                raise CatalogError(f"duplicate entry {current.label}", line_no)
            entries.append(current)
            continue
        if current is None:
            raise CatalogError("data before the first [entry] header", line_no)
        item = parse_line(line, line_no)
        if isinstance(item, NamedClass) and any(c.name == item.name for c in current.classes):
            raise CatalogError(f"duplicate class name {item.name!r} in {current.label}", line_no)
        if isinstance(item, Gen) and any(g.name == item.name for g in current.gens):
            raise CatalogError(f"duplicate generator {item.name!r} in {current.label}", line_no)
        current.items.append(item)
    _link_symbols(entries)
    return Catalog(entries, header, text.endswith("\n") or not text)


def _link_symbols(entries):
    by_prime = {}
    for e in entries:
        table = by_prime.setdefault(e.prime, {})
        for g in e.gens:
            table.setdefault(g.name, g.degree)
            for a in g.aliases:
                table.setdefault(a, g.degree)
    for e in entries:
        e.foreign_symbols = dict(by_prime.get(e.prime, {}))


def load_catalog(source=None):
    """Parse a catalog file (the bundled one by default)."""
    path = Path(source) if source is not None else BUNDLED
    return parse_catalog(path.read_text(encoding="utf-8"))


def load(source=None):
    """List of entries of a catalog file."""
    return load_catalog(source).entries
