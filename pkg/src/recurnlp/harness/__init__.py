"""CLI, rendering and the two experiments."""

from .cluster import Dendrogram, hclust_dendrogram
from .experiments import (
    CompressionReport,
    GenreReport,
    compression_experiment,
    genre_experiment,
)
from .render import render_rp
from .stats import ols_r2

__all__ = [
    "Dendrogram",
    "hclust_dendrogram",
    "CompressionReport",
    "GenreReport",
    "compression_experiment",
    "genre_experiment",
    "render_rp",
    "ols_r2",
]
