"""Thomas-Fermi and semiclassical atomic densities with explicit error envelopes."""

__version__ = "0.1.0"
