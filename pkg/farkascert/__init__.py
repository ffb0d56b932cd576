"""Exact reverse Farkas certificates and convex-duality diagnostics for polyhedral systems"""

__version__ = '0.1.0'
