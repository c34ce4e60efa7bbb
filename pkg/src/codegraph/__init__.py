"""Program graphs for code understanding: Java-subset ASTs, S-ASTs, statement partitioning and a desk-scale PGNN."""

__version__ = "0.1.0"
