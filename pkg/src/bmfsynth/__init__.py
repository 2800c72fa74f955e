"""
Approximate logic synthesis through Boolean matrix factorization.
"""

__version__ = "0.1.0"
