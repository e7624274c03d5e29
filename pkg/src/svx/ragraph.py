"""Region adjacency graph over a supervoxel map with shared-border face counts.

Adjacency uses 6-connectivity faces only; an edge's weight is the number of
face-adjacent voxel pairs straddling the two labels.  Each supervoxel also
carries its total boundary face count: faces to any other label plus faces on
the volume border.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParamError
from .volume import LabelMap


@dataclass
class Rag:
    n_supervoxels: int
    neighbors: list[np.ndarray]        # per supervoxel, sorted neighbor ids
    neighbor_faces: list[np.ndarray]   # faces shared with each neighbor, aligned
    total_boundary: np.ndarray         # per supervoxel, faces to other labels + volume border

    def pair_faces(self, a: int, b: int) -> int:
        """Shared face count of the unordered pair (a, b); 0 if not adjacent."""
        idx = np.searchsorted(self.neighbors[a], b)
        if idx < len(self.neighbors[a]) and self.neighbors[a][idx] == b:
            return int(self.neighbor_faces[a][idx])
        return 0

    def edges(self):
        """Yield (a, b, faces) with a < b, ordered by (a, b)."""
        for a in range(self.n_supervoxels):
            nbrs = self.neighbors[a]
            faces = self.neighbor_faces[a]
            for b, f in zip(nbrs[nbrs > a], faces[nbrs > a]):
                yield a, int(b), int(f)


def build_rag(sp: LabelMap) -> Rag:
    """Build the adjacency graph in a single sweep over the three face axes."""
    labels = sp.labels
    n = int(labels.max()) + 1

    pair_keys = []
    for axis in range(3):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        a = labels[tuple(lo)].ravel()
        b = labels[tuple(hi)].ravel()
        diff = a != b
        a, b = a[diff], b[diff]
        pair_keys.append(np.minimum(a, b) * n + np.maximum(a, b))
    keys, counts = np.unique(np.concatenate(pair_keys), return_counts=True)
    edge_a = (keys // n).astype(np.int64)
    edge_b = (keys % n).astype(np.int64)

    total = np.zeros(n, dtype=np.int64)
    np.add.at(total, edge_a, counts)
    np.add.at(total, edge_b, counts)
    for axis in range(3):
        for side in (0, -1):
            face = [slice(None)] * 3
            face[axis] = side
            total += np.bincount(labels[tuple(face)].ravel(), minlength=n)

    src = np.concatenate([edge_a, edge_b])
    dst = np.concatenate([edge_b, edge_a])
    cnt = np.concatenate([counts, counts])
    order = np.lexsort((dst, src))
    src, dst, cnt = src[order], dst[order], cnt[order]
    starts = np.searchsorted(src, np.arange(n + 1))
    neighbors = [dst[starts[i]:starts[i + 1]] for i in range(n)]
    neighbor_faces = [cnt[starts[i]:starts[i + 1]] for i in range(n)]
    return Rag(n, neighbors, neighbor_faces, total)


def find_neighbours(rag: Rag, members: set[int]) -> set[int]:
    """All supervoxels adjacent to at least one member, excluding members."""
    if not members:
        raise ParamError("members must be nonempty")
    out: set[int] = set()
    for m in members:
        out.update(rag.neighbors[m].tolist())
    return out - members


def shared_border(rag: Rag, members: set[int], candidate: int) -> int:
    """Total faces shared between the candidate and the member set."""
    if candidate in members:
        raise ParamError(f"candidate {candidate} is already a member")
    nbrs = rag.neighbors[candidate]
    faces = rag.neighbor_faces[candidate]
    return int(sum(int(f) for b, f in zip(nbrs, faces) if int(b) in members))


def region_boundary_faces(rag: Rag, members: set[int]) -> int:
    """Boundary faces of the member union: faces to non-members + volume border."""
    total = 0
    internal = 0
    for m in members:
        total += int(rag.total_boundary[m])
        nbrs = rag.neighbors[m]
        faces = rag.neighbor_faces[m]
        internal += int(sum(int(f) for b, f in zip(nbrs, faces) if int(b) in members))
    return total - internal
