"""
Catron Application Package.

This package contains the numerics of the two-photon driven, two-photon
dissipative cavity: the exact stationary Wigner function, its WKB and
effective-potential approximations, the brute-force Lindblad solver, and the
instanton picture of the switching rate between the two attractors.
"""

__version__ = "0.1.0"
