"""Command-line interface of the comixture toolkit."""

__version__ = "0.3.0"
