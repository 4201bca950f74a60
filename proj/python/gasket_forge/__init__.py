"""Circle packings from finite subdivision rules (bindings to the C++ core)."""

from ._gasket_forge import (
    ComplexError,
    DegenerateInput,
    GalleryError,
    GenCircle,
    MobiusMap,
    Packing,
    ParseError,
    PlanarComplex,
    SolverError,
    SubdivisionRule,
    builtin_complex,
    builtin_rule,
    classify,
    format_complex,
    format_packing,
    format_rule,
    inversive_product,
    mobius_from_triples,
    pack,
    parse_complex,
    parse_packing,
    parse_rule,
    run_cli,
    subdivide,
    validate_rule,
)

__all__ = [name for name in dir() if not name.startswith("_")]
