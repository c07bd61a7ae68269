"""fracspec: fractional diffusion on model closed manifolds and recovery of
their spectral data from locally observed responses."""

__version__ = "0.1.0"
