"""Degree validation and generated catalog entries."""

import os
from dataclasses import dataclass, field

from ..algebra import PRIMES, spin_generators, spin_lbar
from .model import (
    BUNDLED, CatalogError, CatalogEntry, Edge, Flag, Gen, ResLine, expression_degree,
    load_catalog, parse_ideal_generator, parse_terms,
)

ENV_VAR = "ROSTCHOW_CATALOG"
# the second naming scheme for the low Spin generators
SPIN_ALIASES = {6: ("y1",), 10: ("y2",), 18: ("y3",), 30: ("y4",)}


def default_catalog_path():
    return os.environ.get(ENV_VAR) or str(BUNDLED)


@dataclass(frozen=True)
class ReportItem:
    entry: str
    item: str
    expected: object
    found: object
    verdict: str        # ok | inconsistent
    known_inconsistent: bool = False
    note: str = ""

    @property
    def ok(self):
        return self.verdict == "ok"

    def to_json(self):
        return {"entry": self.entry, "item": self.item, "expected": self.expected,
                "found": self.found, "verdict": self.verdict,
                "known_inconsistent": self.known_inconsistent, "note": self.note}


@dataclass
class ValidationReport:
    items: list = field(default_factory=list)

    @property
    def flagged(self):
        return [i for i in self.items if not i.ok]

    @property
    def unexpected(self):
        """Flags not announced by the data, and announced flags that did not fire."""
        wrong = [i for i in self.items if not i.ok and not i.known_inconsistent]
        missed = [i for i in self.items if i.ok and i.known_inconsistent]
        return wrong + missed

    def extend(self, other):
        self.items.extend(other.items)
        return self

    def to_json(self):
        return [i.to_json() for i in self.items]


def _is_zero_expression(text):
    return all(c == 0 for c, _ in parse_terms(text))


def _degree_or_note(text, symbols, prime):
    try:
        return expression_degree(text, symbols, prime), ""
    except CatalogError as exc:
        return None, str(exc)


def validate_degrees(entry, catalog=None):
    """Check every degree claim of an entry; never raises on bad data.

    ``catalog`` (optional) supplies the target entries of restriction lines so
    that their class names can be resolved.
    """
    report = ValidationReport()
    label = entry.label
    p = entry.prime
    symbols = entry.symbol_degrees()
    P = entry.presentation()

    def add(item, expected, found, known=False, note=""):
        verdict = "ok" if found is not None and found == expected and not note else "inconsistent"
        report.items.append(ReportItem(label, item, expected, found, verdict, known, note))

    for c in entry.classes:
        found, note = _degree_or_note(c.image, symbols, p)
        add(f"class {c.name} -> {c.image}", c.degree, found, c.known_inconsistent, note)
        if c.corrected:
            found, note = _degree_or_note(c.corrected, symbols, p)
            add(f"class {c.name} -> {c.corrected} (corrected)", c.degree, found, False, note)

    for r in entry.res_lines:
        try:
            mono_deg = expression_degree(r.monomial, symbols, p)
            admissible = P.is_admissible(_monomial(P, r.monomial))
        except (CatalogError, KeyError) as exc:
            add(f"res ({','.join(r.ideal)}){r.monomial}", None, None, note=str(exc))
            continue
        for g in r.ideal:
            coeff, vexp = parse_ideal_generator(g)
            vdeg = sum(-2 * (p ** (i + 1) - 1) * e for i, e in enumerate(vexp))
            total = mono_deg + vdeg
            notes = []
            if total < 0:
                notes.append("negative degree")
            if not _is_power(coeff, p):
                notes.append(f"coefficient {coeff} is not a power of {p}")
            if not admissible:
                notes.append("monomial is not admissible")
            # the generator's degree must be the monomial degree shifted by the v-part
            add(f"res {g}*{r.monomial}", mono_deg + vdeg, total, note="; ".join(notes))

    class_degrees = {c.name: c.degree for c in entry.classes}
    class_degrees["1"] = 0
    for line in entry.chow_lines:
        for name in line.names:
            if name in class_degrees:
                add(f"chow {line.degree} name {name}", line.degree, class_degrees[name])

    for b in entry.bidegrees:
        deg = class_degrees.get(b.cls)
        if deg is None:
            add(f"bideg {b.cls}", None, None, note="unknown class")
            continue
        # rho-exponent is the topological degree, the weight is the Chow degree
        add(f"bideg {b.cls} rho", deg, b.rho)
        add(f"bideg {b.cls} weight", deg // 2, b.rho + b.tau)

    for r in entry.restrictions:
        source = class_degrees.get(r.cls)
        if source is None:
            add(f"restrict {r.target} {r.cls}", None, None, note="unknown class")
            continue
        if _is_zero_expression(r.expression):
            add(f"restrict {r.target} {r.cls} -> {r.expression}", source, source)
            continue
        table = dict(symbols)
        if catalog is not None:
            try:
                target = catalog.get(r.target, p)
                table.update({c.name: c.degree for c in target.classes})
            except KeyError:
                pass
        found, note = _degree_or_note(r.expression, table, p)
        add(f"restrict {r.target} {r.cls} -> {r.expression}", source, found, note=note)

    for e in entry.edges:
        names = set(entry.symbol_degrees())
        for lab in e.labels:
            try:
                deg = expression_degree(lab, {g: symbols[g] for g in names if g in symbols}, p)
                add(f"edge {e.target} label {lab}", deg, deg)
            except CatalogError as exc:
                add(f"edge {e.target} label {lab}", None, None, note=str(exc))
    return report


def _monomial(P, text):
    from .model import parse_monomial
    return parse_monomial(P, text)


def _is_power(n, p):
    n = abs(n)
    if n == 0:
        return False
    while n % p == 0:
        n //= p
    return n == 1


def validate_catalog(catalog):
    report = ValidationReport()
    for e in catalog:
        report.extend(validate_degrees(e, catalog))
    return report


def spin_entry(ell, catalog=None):
    """Entry for Spin(2*ell+1) at p=2 with the generator rule applied.

    The chain edge goes to Spin(2*ell-1) and is labelled by the new
    generators.  Invariant-ideal data, classes and Chow data are copied from
    the catalog when it has the group; otherwise the entry is marked
    incomplete.
    """
    if not 2 <= ell <= 16:
        raise ValueError("ell must lie in 2..16")
    group = f"Spin_{2 * ell + 1}"
    gens = spin_generators(ell)
    below = {g.name for g in spin_generators(ell - 1)} if ell > 2 else set()
    labels = tuple(g.name for g in gens if g.name not in below)
    items = [Flag("gr-level")]
    items += [Gen(g.name, g.degree, g.height, SPIN_ALIASES.get(g.degree, ())) for g in gens]
    items.append(Edge(f"Spin_{2 * ell - 1}", labels, "tensor_factor"))

    if catalog is None:
        catalog = load_catalog(default_catalog_path())
    try:
        known = catalog.get(group, 2)
    except KeyError:
        known = None
    if known is not None:
        if [g.name for g in known.gens] != [g.name for g in gens]:
            raise CatalogError(f"catalog generators of {group} disagree with the generator rule")
        items += [x for x in known.items if not isinstance(x, (Flag, Gen, Edge))]
        items += [Flag(f) for f in sorted(known.flags - {"gr-level"})]
    if (known is None or not known.res_lines) and gens:
        items.append(Flag("res-incomplete"))
    entry = CatalogEntry(group, 2, items)
    entry.foreign_symbols = dict(catalog.entries[0].foreign_symbols) if known is None else dict(known.foreign_symbols)
    return entry


def spin_ell_of(group):
    return CatalogEntry(group, 2).spin_ell


def rost_entry(n, p):
    """The Rost motive R_n at p: y of degree 2(p^n-1)/(p-1), height p, with
    invariant ideal (p, v_1, ..., v_{n-1}) on every power of y."""
    if p not in PRIMES or n < 1:
        raise ValueError("need p in {2,3,5} and n >= 1")
    deg = 2 * (p ** n - 1) // (p - 1)
    ideal = (str(p),) + tuple(f"v{i}" for i in range(1, n))
    powers = ["y"] + [f"y^{i}" for i in range(2, p)]
    items = [Gen("y", deg, p)]
    items.append(Edge("pt", tuple(powers), "kernel_basis"))
    items += [ResLine(ideal, m) for m in powers]
    return CatalogEntry(f"R_{n}", p, items)


def lbar_for(entry):
    ell = entry.spin_ell
    return None if ell is None else spin_lbar(ell)
