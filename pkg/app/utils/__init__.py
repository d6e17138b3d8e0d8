"""
Utility Functions Package.

This package contains finite-difference and quadrature helpers shared by the
compute modules.
"""
