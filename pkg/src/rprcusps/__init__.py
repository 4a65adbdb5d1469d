"""Cusp points of 3-RPR planar parallel manipulators."""
