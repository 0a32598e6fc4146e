"""Complete-linkage agglomerative clustering with Newick export."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InsufficientDataError, RecurNLPError

__all__ = ["Node", "Dendrogram", "hclust_dendrogram", "newick_label"]

_NEWICK_SPECIAL = set(" \t\n()[]':;,")


@dataclass(frozen=True)
class Node:
    height: float
    label: str | None = None
    children: tuple["Node", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.label]
        return [lab for c in self.children for lab in c.leaves()]


@dataclass(frozen=True)
class Dendrogram:
    root: Node
    merges: tuple[tuple[tuple[str, ...], tuple[str, ...], float], ...]

    def leaves(self) -> list[str]:
        return self.root.leaves()

    def to_newick(self, digits: int = 6) -> str:
        def fmt(x: float) -> str:
            return f"{x:.{digits}g}"

        def walk(node: Node, parent_height: float | None) -> str:
            if node.is_leaf:
                s = newick_label(node.label)
            else:
                s = "(" + ",".join(walk(c, node.height) for c in node.children) + ")"
            if parent_height is not None:
                s += ":" + fmt(parent_height - node.height)
            return s

        return walk(self.root, None) + ";"

    def as_dict(self) -> dict:
        return {
            "newick": self.to_newick(),
            "merges": [
                {"left": list(a), "right": list(b), "height": h} for a, b, h in self.merges
            ],
        }


def newick_label(label: str) -> str:
    if any(ch in _NEWICK_SPECIAL for ch in label) or not label:
        return "'" + label.replace("'", "''") + "'"
    return label


def hclust_dendrogram(matrix: Sequence[Sequence[float]] | np.ndarray, labels: Sequence[str]) -> Dendrogram:
    """Agglomerate rows under complete linkage on Euclidean distance.

    At each step the pair of clusters with the smallest linkage distance
    merges; equal distances are resolved by the alphabetically smallest
    member label of each cluster, so the tree does not depend on row order.
    """
    x = np.asarray(matrix, dtype=float)
    labels = [str(s) for s in labels]
    if x.ndim != 2 or x.shape[0] != len(labels):
        raise ValueError("matrix must have one row per label")
    if len(labels) < 2:
        raise InsufficientDataError("need at least 2 rows to cluster")
    if len(set(labels)) != len(labels):
        dup = sorted({s for s in labels if labels.count(s) > 1})
        raise RecurNLPError(f"duplicate labels: {', '.join(dup)}")

    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))

    # each cluster: (sorted member indices by label, node)
    clusters = [([i], Node(0.0, labels[i])) for i in range(len(labels))]
    clusters.sort(key=lambda c: labels[c[0][0]])
    merges = []
    while len(clusters) > 1:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                ma, mb = clusters[a][0], clusters[b][0]
                d = float(dist[np.ix_(ma, mb)].max())
                key = (d, labels[ma[0]], labels[mb[0]])
                if best is None or key < best[0]:
                    best = (key, a, b)
        (d, _, _), a, b = best
        (ma, na), (mb, nb) = clusters[a], clusters[b]
        members = sorted(ma + mb, key=lambda i: labels[i])
        merges.append((tuple(labels[i] for i in ma), tuple(labels[i] for i in mb), d))
        merged = (members, Node(d, None, (na, nb)))
        clusters = [c for k, c in enumerate(clusters) if k not in (a, b)] + [merged]
        clusters.sort(key=lambda c: labels[c[0][0]])
    return Dendrogram(clusters[0][1], tuple(merges))
