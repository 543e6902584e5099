# gapkit package
# Densities, spectral gaps and completeness radii of separated real sequences

__version__ = "0.1.0"
