"""
Streamlit UI Package.

This package contains the Streamlit viewer for catron output directories.
"""
