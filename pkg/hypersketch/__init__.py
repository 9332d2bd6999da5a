"""hypersketch - linear sketches for hypergraph cut sparsification."""

from hypersketch.version import VERSION

__all__ = ["VERSION"]
