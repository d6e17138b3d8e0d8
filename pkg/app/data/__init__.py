"""
Configuration and Output Package.

This package contains run settings and the CSV/JSON writers for run outputs.
"""
