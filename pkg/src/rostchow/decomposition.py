"""Verifiers for decompositions along subgroup chains.

Everything is checked at the level of graded characters and classes in
augmentation quotients: the character of a presentation against the
character predicted by a chain edge, and named restriction images against
the classes they are claimed to hit.
"""

import re
from dataclasses import dataclass, field

from .algebra import (
    AlgebraError, AlgebraPresentation, GeneratorSpec, NotSurjectiveError, basis, canonical_surjection,
    convolve, exterior, kernel_basis, kernel_character, poincare, series_from_degrees, spin_lbar, trim,
)
from .catalog import CatalogError, expression_degree, parse_monomial, parse_terms
from .omega import (
    IncompleteDataError, NotInModuleError, OmegaElement, augmentation_quotient, class_is_zero, class_of,
    contains, from_ideal_data, reduce_class,
)

PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "not-applicable"


class DecompositionError(ValueError):
    pass


@dataclass
class CheckResult:
    """One verification: which entry, which check, the verdict, and witnesses."""

    entry: str
    check: str
    verdict: str
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict != FAIL

    def to_json(self):
        return {"entry": self.entry, "check": self.check, "verdict": self.verdict,
                "witnesses": _jsonable(self.witnesses)}


@dataclass
class EdgeCheckResult(CheckResult):
    convention: str = "tensor_factor"
    mismatch_degree: int = None


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)


def _first_mismatch(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return next((d for d in range(n) if a[d] != b[d]), None)


def label_degrees(entry, labels):
    P = entry.presentation()
    out = []
    for lab in labels:
        try:
            mono = parse_monomial(P, lab)
        except CatalogError as exc:
            raise DecompositionError(f"unresolvable label {lab!r} for {entry.label}: {exc}") from None
        if not P.is_admissible(mono):
            raise DecompositionError(f"label {lab!r} is zero in {entry.label}")
        out.append((lab, P.monomial_degree(mono)))
    return out


def verify_chain_edge(upper, lower, labels, convention="tensor_factor"):
    """Character check for the edge ``upper <- lower`` labelled by monomials of ``upper``.

    tensor_factor: P_upper = Lambda(labels) (x) P_lower.
    kernel_basis:  the kernel of the canonical surjection P_upper -> P_lower
                   has the label degrees as its character.
    """
    if upper.prime != lower.prime:
        raise DecompositionError("edge between different primes")
    labs = label_degrees(upper, labels)
    P1, P2 = upper.presentation(), lower.presentation()
    edge = f"{upper.group} <- {lower.group}"
    wit = {"edge": edge, "labels": [l for l, _ in labs]}
    if convention == "tensor_factor":
        lower_names = set(P2.names)
        # powers such as y6^2 are fine labels; a bare generator of the lower group is not
        for lab, _ in labs:
            factors = parse_terms(lab)[0][1]
            if len(factors) == 1 and factors[0][1] == 1 and \
                    P1.generators[P1.index(factors[0][0])].name in lower_names:
                raise DecompositionError(f"label {lab!r} is a generator of {lower.group}")
        Lam = exterior(upper.prime, [(f"l{i}", d) for i, (_, d) in enumerate(labs)])
        lhs = poincare(P1)
        rhs = convolve(poincare(Lam), poincare(P2))
    elif convention == "kernel_basis":
        hom = canonical_surjection(P1, P2)
        try:
            lhs = kernel_character(hom)
        except NotSurjectiveError as exc:
            wit["error"] = str(exc)
            return EdgeCheckResult(upper.label, "chain-edge", FAIL, wit, convention, exc.degree)
        rhs = series_from_degrees([d for _, d in labs], len(lhs) - 1)
        wit["kernel_monomials"] = [P1.format_monomial(m) for m in kernel_basis(hom) if any(m)]
    else:
        raise DecompositionError(f"unknown convention {convention!r}")
    lhs, rhs = trim(lhs), trim(rhs)
    bad = _first_mismatch(lhs, rhs)
    wit.update({"lhs": lhs, "rhs": rhs})
    return EdgeCheckResult(upper.label, "chain-edge", PASS if bad is None else FAIL, wit, convention, bad)


def verify_catalog_edge(catalog, entry, edge):
    lower = catalog.get(edge.target, entry.prime)
    return verify_chain_edge(entry, lower, edge.labels, edge.convention)


# --- restriction to a smaller motive -------------------------------------------

def _generator_labels(G, G2, labels):
    P = G.presentation()
    names = []
    for lab in labels:
        terms = parse_terms(lab)
        if len(terms) != 1 or len(terms[0][1]) != 1 or terms[0][1][0][1] != 1:
            raise DecompositionError(f"restriction needs generator labels, got {lab!r}")
        names.append(P.generators[P.index(terms[0][1][0][0])].name)
    expected = set(G2.presentation().names) | set(names)
    if expected != set(P.names):
        raise DecompositionError(
            f"generators of {G.group} are not those of {G2.group} plus the labels {labels}")
    return names


def target_module(G, G2, labels, vbound=None):
    """Res(G2) (x) Lambda(labels) inside the cobordism ambient of G."""
    if not G2.res_complete:
        raise IncompleteDataError(f"restriction data of {G2.label} is incomplete")
    names = _generator_labels(G, G2, labels)
    A = G.ambient() if vbound is None else G.ambient(vbound)
    P = A.presentation
    label_gens = [P.index(n) for n in names]
    label_monos = []
    for d in range(P.top_degree + 1):
        for m in basis(P, d):
            if all(m[i] == 0 for i in range(len(m)) if i not in label_gens):
                label_monos.append(m)
    pairs = []
    for ideal, mono in G2.res_pairs():
        for lm in label_monos:
            full = [0] * len(P.generators)
            for name, e in zip(G2.presentation().names, mono):
                full[P.index(name)] += e
            full = tuple(a + b for a, b in zip(full, lm))
            if P.is_admissible(full):
                pairs.append((ideal, full))
    for lm in label_monos:
        if any(lm):
            pairs.append(([(1, ())], lm))
    return from_ideal_data(A, pairs, complete=True)


def _substitute(expression, classes_below, G):
    """Rewrite names of classes of the smaller group by their cobordism images."""
    out = []
    for coef, factors in parse_terms(expression):
        parts = [str(coef)] if coef != 1 else []
        for name, e in factors:
            if name in classes_below:
                parts.extend([f"({classes_below[name]})"] * e)
            else:
                parts.append(name if e == 1 else f"{name}^{e}")
        out.append(parts or ["1"])
    return out


def _evaluate(A, G, expression, classes_below):
    from .catalog import omega_from_text
    total = A.zero()
    for parts in _substitute(expression, classes_below, G):
        term = A.one()
        for part in parts:
            text = part[1:-1] if part.startswith("(") else part
            term = term * omega_from_text(A, text)
        total = total + term
    return total


def verify_motive_restriction(G, G2, labels, N=None, integral=None):
    """Classes of G restricted to the motive of G2 tensored with Lambda(labels).

    Checks containment of every named image in the target module, compares
    classes with the restriction lines of G, and compares the character of
    the target's augmentation quotient with the expected Chow data of G2
    tensored with Lambda(labels).  Comparisons are mod p unless the
    restriction line is marked integral.
    """
    results = []
    T = target_module(G, G2, labels)
    A = T.ambient
    p = G.prime
    below = {c.name: c.working_image for c in G2.classes}
    expected_images = {}
    for r in G.restrictions:
        if r.target == G2.group:
            expected_images.setdefault(r.cls, []).append(r)
    if G is G2 or (G.key == G2.key and not labels):
        for c in G.classes:
            expected_images.setdefault(c.name, []).append(None)

    for c in G.classes:
        x = G.parse_omega(c.working_image, ambient=A)
        wit = {"class": c.name, "image": str(x), "corrected": bool(c.corrected)}
        if not contains(T, x):
            results.append(CheckResult(G.label, "restriction-containment", FAIL, wit))
            continue
        cls = class_of(T, x)
        wit["class_coordinates"] = [str(v) for v in cls]
        wit["zero_mod_p"] = class_is_zero(cls, p)
        results.append(CheckResult(G.label, "restriction-containment", PASS, wit))
        for r in expected_images.get(c.name, []):
            if r is None:
                want, mode, text = cls, "integral", c.name
            else:
                y = _evaluate(A, G, r.expression, below) if not _is_zero_text(r.expression) else A.zero()
                if not y.is_zero() and not contains(T, y):
                    results.append(CheckResult(G.label, "restriction-image", FAIL,
                                               {**wit, "expected": r.expression, "error": "expected image not in target"}))
                    continue
                want = class_of(T, y) if not y.is_zero() else tuple(0 for _ in cls)
                use_integral = r.integral if integral is None else integral
                mode, text = ("integral" if use_integral else f"mod {p}"), r.expression
            if mode == "integral":
                ok = _pad(cls, want) == _pad(want, cls)
            else:
                ok = reduce_class(_pad(cls, want), p) == reduce_class(_pad(want, cls), p)
            results.append(CheckResult(G.label, "restriction-image", PASS if ok else FAIL,
                                       {**wit, "expected": text, "comparison": mode,
                                        "expected_coordinates": [str(v) for v in want]}))

    computed = augmentation_quotient(T, N)
    lam = poincare(exterior(p, [(n, G.presentation().generators[G.presentation().index(n)].degree)
                                for n in _generator_labels(G, G2, labels)]))
    results.append(character_check(G.label, computed, G2, lam))
    return results


def _is_zero_text(text):
    return all(c == 0 for c, _ in parse_terms(text))


def _pad(a, b):
    a = tuple(a)
    return a + (0,) * max(0, len(b) - len(a))


def character_check(label, computed, G2, lam_series):
    """Compare a computed quotient with expected_chow(G2) (x) Lambda.

    Inclusion-only data is checked by per-degree p-rank domination; mod-p
    data by p-ranks; integral data by exact groups.
    """
    expected = G2.expected_chow().tensor_free(lam_series)
    wit = {"computed": computed.to_json(), "expected": expected.to_json()}
    if G2.inclusion_only or G2.chow_mod_p:
        degs = sorted(set(computed.degrees()) | set(expected.degrees()))
        if G2.inclusion_only:
            bad = [d for d in degs if expected.p_rank(d) > computed.p_rank(d)]
            wit["comparison"] = "p-rank inclusion"
        else:
            bad = [d for d in degs if expected.p_rank(d) != computed.p_rank(d)]
            wit["comparison"] = "p-rank equality"
    else:
        degs = sorted(set(computed.degrees()) | set(expected.degrees()))
        bad = [d for d in degs if computed.pieces.get(d) != expected.pieces.get(d)]
        wit["comparison"] = "exact"
    if bad:
        wit["mismatch_degree"] = bad[0]
    return CheckResult(label, "character", FAIL if bad else PASS, wit)


def reflexive_check(G, N=None):
    """Self-consistency: quotient of Res(G) against the expected Chow data of G."""
    results = verify_motive_restriction(G, G, (), N)
    return results


# --- dominance and kernel ideal ------------------------------------------------

@dataclass(frozen=True)
class DominanceSource:
    """Lambda(exterior degrees) (x) Z/p[poly_degree] (polynomial factor optional)."""

    exterior_degrees: tuple
    poly_degree: int = None
    description: str = ""

    def character(self, N):
        s = series_from_degrees([0], N)
        for d in self.exterior_degrees:
            s = convolve(s, series_from_degrees([0, d], N), N)
        if self.poly_degree:
            s = convolve(s, series_from_degrees(range(0, N + 1, self.poly_degree), N), N)
        return s


def spin_dominance_source(ell):
    """Lambda(c_2, ..., c_lbar) (x) Z/2[e_{2^{t+1}}] with 2^t <= ell < 2^{t+1}."""
    lbar = spin_lbar(ell)
    t = ell.bit_length() - 1
    e = 2 ** (t + 1)
    return DominanceSource(tuple(2 * i for i in range(2, lbar + 1)), 2 * e,
                           f"Lambda(c2..c{lbar}) (x) Z/2[e{e}]")


def dominance_ell(entry):
    if entry.spin_ell is not None:
        return entry.spin_ell
    if entry.group == "R_2(R)":
        return 3   # the Spin_7 motive over the reals
    return None


def dominance_check(entry, source=None, N=None):
    """Per-degree dim(source) >= p-rank of the expected Chow data."""
    if source is None:
        ell = dominance_ell(entry)
        if ell is None or ell < 2:
            return CheckResult(entry.label, "dominance", NOT_APPLICABLE,
                               {"reason": "no surjection source known for this entry"})
        source = spin_dominance_source(ell)
    expected = entry.expected_chow()
    if N is None:
        N = max(expected.degrees(), default=0)
    have = source.character(N)
    need = expected.p_rank_series(N)
    bad = next((d for d in range(N + 1) if need[d] > have[d]), None)
    wit = {"source": source.description, "source_character": trim(have), "chow_p_ranks": trim(need)}
    if not expected.pieces:
        wit["note"] = "no expected Chow data; vacuous"
    if bad is not None:
        wit["first_violation"] = bad
    return CheckResult(entry.label, "dominance", PASS if bad is None else FAIL, wit)


CHERN = re.compile(r"c(\d+)$")


def kernel_ideal_check(G, G2, labels):
    """Chern classes c_j with j above lbar of G2 restrict to zero mod p."""
    results = []
    if not labels and G.key == G2.key:
        return [CheckResult(G.label, "kernel-ideal", PASS, {"note": "identity edge; vacuous"})]
    ell2 = G2.spin_ell
    if ell2 is None:
        return [CheckResult(G.label, "kernel-ideal", NOT_APPLICABLE, {"reason": f"{G2.group} is not a Spin group"})]
    lbar2 = spin_lbar(ell2)
    T = target_module(G, G2, labels)
    for c in G.classes:
        m = CHERN.match(c.name)
        if not m or int(m.group(1)) <= lbar2:
            continue
        x = G.parse_omega(c.working_image, ambient=T.ambient)
        wit = {"class": c.name, "image": str(x), "lbar_below": lbar2}
        try:
            cls = class_of(T, x)
        except NotInModuleError:
            results.append(CheckResult(G.label, "kernel-ideal", FAIL, {**wit, "error": "image not in target"}))
            continue
        wit["class_coordinates"] = [str(v) for v in cls]
        ok = class_is_zero(cls, G.prime)
        results.append(CheckResult(G.label, "kernel-ideal", PASS if ok else FAIL, wit))
    if not results:
        results.append(CheckResult(G.label, "kernel-ideal", PASS, {"note": "no Chern classes above lbar; vacuous"}))
    return results


def antecedent_check(entry, name="c2c4"):
    """Is the named class nonzero mod p in the entry's own augmentation quotient?

    Used for the conditional statement that needs c2c4 != 0.
    """
    M = entry.res_module()
    x = entry.parse_omega(entry.named_class(name).working_image, ambient=M.ambient)
    cls = class_of(M, x)
    nonzero = not class_is_zero(cls, entry.prime)
    return CheckResult(entry.label, "antecedent", PASS if nonzero else FAIL,
                       {"class": name, "class_coordinates": [str(v) for v in cls], "nonzero_mod_p": nonzero})


def kernel_tensor_relation(upper, lower, labels):
    """For a tensor edge with height-2 labels, kernel labels are label monomials times a basis of P_lower."""
    P2 = lower.presentation()
    Plab = exterior(upper.prime, [(lab, d) for lab, d in label_degrees(upper, labels)])
    degs = []
    for d in range(1, Plab.top_degree + 1):
        for _ in basis(Plab, d):
            for e in range(P2.top_degree + 1):
                degs.extend([d + e] * len(basis(P2, e)))
    return degs
