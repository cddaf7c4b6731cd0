"""benchforge: human-in-the-loop curation of text-to-SQL benchmarks."""

__version__ = "0.1.0"
