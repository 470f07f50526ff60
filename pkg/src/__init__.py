"""
csterm - Typed Cyclic Sharing Terms
Main package initialization.
"""

__version__ = "1.0.0"
