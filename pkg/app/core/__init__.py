"""
Core Physics Package.

This package contains the model conventions, special functions, Fock-space
numerics, analytic Wigner functions, instanton dynamics and the acceptance
suite.
"""
