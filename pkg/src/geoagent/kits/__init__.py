"""Geoscience tool kits: index, inversion, analysis, statistics, perception."""
