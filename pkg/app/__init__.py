"""UMR toolkit - parse, score, convert and repair Uniform Meaning Representation graphs."""

__version__ = "0.1.0"
