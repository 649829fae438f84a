"""
Andermeans package
"""

from andermeans.__version__ import __version__
from andermeans.anderson import aa_kmeans_solve
from andermeans.config import AAConfig, SolverConfig
from andermeans.lloyd import lloyd_solve
from andermeans.model import Assignment, CentroidSet, Dataset, Energy
from andermeans.solver_report import SolverReport

__all__ = [
    "AAConfig",
    "Assignment",
    "CentroidSet",
    "Dataset",
    "Energy",
    "SolverConfig",
    "SolverReport",
    "__version__",
    "aa_kmeans_solve",
    "lloyd_solve",
]
