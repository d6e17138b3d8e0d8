"""
Test Package.

This package contains unit and integration tests for catron.
"""
