"""Finite groupoids, principal groupoid bundles and their nonabelian Cech data."""
