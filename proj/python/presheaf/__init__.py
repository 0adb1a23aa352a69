"""Finite presheaf models of feature spaces."""

from ._presheaf import (
    BoundRefusal,
    Error,
    Identification,
    InvariantViolation,
    LawReport,
    MalformedInput,
    MergedModel,
    Model,
    ParseError,
    Presheaf,
    Session,
    Violation,
    amalgamate,
    analogy_check,
    blocking_sets,
    canonicalize,
    check_adjunction_triple,
    compile,
    emergent_sections,
    extensions,
    global_sections,
    load_model,
    load_session,
    oracle_sections,
    parse_model,
    random_model,
    render_canvas,
    run_cli,
    transfer,
    validate_laws,
    yoneda_count,
)

__all__ = [name for name in dir() if not name.startswith("_")]
