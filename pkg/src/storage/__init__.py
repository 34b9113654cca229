from .artifacts import (
    SCHEMA_VERSION,
    ArtifactStore,
    SchemaVersionError,
    demo_from_record,
    demo_to_record,
    operator_from_record,
    operator_to_record,
)

__all__ = [
    "SCHEMA_VERSION", "ArtifactStore", "SchemaVersionError", "demo_from_record",
    "demo_to_record", "operator_from_record", "operator_to_record",
]
