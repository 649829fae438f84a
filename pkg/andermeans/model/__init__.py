"""Core data types and the clustering energy."""

from .energy import assigned_squared_distances, energy
from .types import Assignment, CentroidSet, Dataset, Energy

__all__ = [
    "Assignment",
    "CentroidSet",
    "Dataset",
    "Energy",
    "assigned_squared_distances",
    "energy",
]
