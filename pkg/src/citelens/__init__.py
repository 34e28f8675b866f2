"""citelens: personalized citation augmentation engine and reading service."""

__version__ = "0.1.0"

SCHEMA_VERSION = "1"
