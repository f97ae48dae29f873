"""Store package: database values and their document formats.

Exports:
- Database: name -> (schema, relation)
- load_database, load_schemas, dump_database: document I/O
- DatabaseFormatError
"""
from .database import (  # noqa: F401
    Database,
    DatabaseFormatError,
    dump_database,
    load_database,
    load_schemas,
)
