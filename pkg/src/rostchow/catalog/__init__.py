from .model import (
    BUNDLED, Assertion, Bidegree, Catalog, CatalogEntry, CatalogError, ChowLine, Comment, Edge, Flag,
    Gen, NamedClass, ResLine, Restriction, expression_degree, load, omega_from_text, parse_catalog,
    parse_ideal_generator, parse_monomial, parse_terms,
)
from .checks import (
    ENV_VAR, ReportItem, ValidationReport, default_catalog_path, rost_entry, spin_entry,
    validate_catalog, validate_degrees,
)
from .model import load_catalog as _load_catalog


def load_catalog(source=None):
    """Parse a catalog; defaults to $ROSTCHOW_CATALOG, then the bundled file."""
    return _load_catalog(source if source is not None else default_catalog_path())


__all__ = [
    "BUNDLED", "Assertion", "Bidegree", "Catalog", "CatalogEntry", "CatalogError", "ChowLine",
    "Comment", "Edge", "Flag", "Gen", "NamedClass", "ResLine", "Restriction", "ENV_VAR",
    "ReportItem", "ValidationReport", "default_catalog_path", "expression_degree", "load",
    "load_catalog", "omega_from_text", "parse_catalog", "parse_ideal_generator", "parse_monomial",
    "parse_terms", "rost_entry", "spin_entry", "validate_catalog", "validate_degrees",
]
