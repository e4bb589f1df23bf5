"""loclab: numerical checks of local applicability for quantum transformations."""

__version__ = "0.1.0"
