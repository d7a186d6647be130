"""Joint friction identification and compensation for harmonic-drive joints."""
__version__ = "0.1.0"
