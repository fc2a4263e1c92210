"""Search tree and the shared RRT* machinery: sorted candidate lists,
best-parent selection, insertion, rewiring and path extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import _kernels as K
from .environment import Environment
from .errors import UsageError
from .geometry import Config, as_config, distance
from .nn_index import NnIndex

ROOT = 0


class Tree:
    """Growing tree with cached cost-to-root.

    Vertex ids are dense integers in insertion order; the root is id 0 and is
    its own parent. Storage is grown by doubling.
    """

    def __init__(self, root: Config, capacity: int = 1024, bounds=None):
        root = as_config(root)
        self.dim = root.size
        self.coords = np.empty((capacity, self.dim))
        self.cost = np.empty(capacity)
        self.parent = np.empty(capacity, dtype=np.int64)
        self.children: list[list[int]] = []
        self.index = NnIndex(self.dim, bounds=bounds)
        self.node_count = 0
        self._append(root, ROOT, 0.0)

    @property
    def root(self) -> Config:
        return self.coords[ROOT]

    def __len__(self) -> int:
        return self.node_count

    def config(self, vid: int) -> Config:
        return self.coords[vid]

    def _append(self, x: Config, parent: int, cost: float) -> int:
        vid = self.node_count
        if vid == self.coords.shape[0]:
            grow = self.coords.shape[0]
            self.coords = np.concatenate([self.coords, np.empty((grow, self.dim))])
            self.cost = np.concatenate([self.cost, np.empty(grow)])
            self.parent = np.concatenate([self.parent, np.empty(grow, dtype=np.int64)])
        self.coords[vid] = x
        self.cost[vid] = cost
        self.parent[vid] = parent
        self.children.append([])
        if vid != parent:
            self.children[parent].append(vid)
        self.index.insert(x, vid)
        self.node_count += 1
        return vid

    def nearest(self, x: Config) -> int:
        return self.index.nearest(x)

    def near(self, x: Config, r: float) -> np.ndarray:
        return self.index.near(x, r)

    def descendants(self, vid: int) -> list[int]:
        out = []
        stack = list(self.children[vid])
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(self.children[v])
        return out

    def reparent(self, vid: int, new_parent: int, new_cost: float) -> None:
        """Move ``vid`` under ``new_parent`` and shift its whole subtree's costs."""
        old_parent = int(self.parent[vid])
        self.children[old_parent].remove(vid)
        self.children[new_parent].append(vid)
        self.parent[vid] = new_parent
        delta = new_cost - self.cost[vid]
        self.cost[vid] = new_cost
        sub = self.descendants(vid)
        if sub:
            self.cost[sub] += delta

    def snapshot(self) -> list[tuple[int, list[float], int, float]]:
        """``(id, coords, parent_id, cost)`` records in id order."""
        return [
            (v, self.coords[v].tolist(), int(self.parent[v]), float(self.cost[v]))
            for v in range(self.node_count)
        ]

    def check_integrity(self, env: Environment | None = None, rtol: float = 1e-9) -> list[str]:
        """Recompute every cost from scratch and walk every parent chain.

        Returns a list of problems; empty means the tree is consistent.
        """
        problems: list[str] = []
        n = self.node_count
        if self.cost[ROOT] != 0.0 or self.parent[ROOT] != ROOT:
            problems.append("root must have cost 0 and be its own parent")
        fresh = np.full(n, np.nan)
        fresh[ROOT] = 0.0
        for v in range(1, n):
            chain = []
            u = v
            steps = 0
            while np.isnan(fresh[u]):
                chain.append(u)
                u = int(self.parent[u])
                steps += 1
                if steps > n:
                    problems.append(f"cycle reached from vertex {v}")
                    return problems
            for w in reversed(chain):
                p = int(self.parent[w])
                fresh[w] = fresh[p] + distance(self.coords[p], self.coords[w])
        for v in range(1, n):
            if abs(fresh[v] - self.cost[v]) > rtol * max(1.0, abs(fresh[v])):
                problems.append(f"vertex {v}: cached cost {self.cost[v]!r} != recomputed {fresh[v]!r}")
        if env is not None:
            for v in range(1, n):
                p = int(self.parent[v])
                if not env.point_free(self.coords[v]):
                    problems.append(f"vertex {v} is not in free space")
                if not env.segment_free(self.coords[p], self.coords[v]):
                    problems.append(f"edge {p}->{v} is in collision")
        return problems


class Candidate(NamedTuple):
    """Potential parent ``vertex`` for ``target`` with cost-through-vertex ``total_cost``."""

    vertex: int
    total_cost: float
    edge_length: float
    origin: Config
    target: Config


class SortedCandidates:
    """Candidates sorted by ascending total cost, ties by vertex id.

    Sequence of :class:`Candidate`; the parallel arrays are exposed for the
    vectorised rewiring pass.
    """

    __slots__ = ("vertices", "total_costs", "edge_lengths", "origins", "target")

    def __init__(self, vertices, total_costs, edge_lengths, origins, target):
        self.vertices = vertices
        self.total_costs = total_costs
        self.edge_lengths = edge_lengths
        self.origins = origins
        self.target = target

    def __len__(self) -> int:
        return self.vertices.size

    def __getitem__(self, k: int) -> Candidate:
        return Candidate(
            int(self.vertices[k]),
            float(self.total_costs[k]),
            float(self.edge_lengths[k]),
            self.origins[k],
            self.target,
        )

    def __iter__(self) -> Iterator[Candidate]:
        for k in range(self.vertices.size):
            yield self[k]

    def __repr__(self) -> str:
        return f"SortedCandidates({list(zip(self.vertices.tolist(), self.total_costs.tolist()))})"


class OpCounters:
    """Per-primitive call counts."""

    __slots__ = ("sample", "nearest", "near", "collision", "steer")

    def __init__(self):
        self.sample = 0
        self.nearest = 0
        self.near = 0
        self.collision = 0
        self.steer = 0

    def total(self) -> int:
        return self.sample + self.nearest + self.near + self.collision + self.steer

    def as_dict(self) -> dict[str, int]:
        return {k: getattr(self, k) for k in self.__slots__}


def get_sorted_list(x_rand: Config, near, tree: Tree) -> SortedCandidates:
    """Build the cost-sorted candidate list; no collision checks happen here."""
    ids = np.sort(np.asarray(near, dtype=np.int64))
    target = np.asarray(x_rand, dtype=np.float64)
    order, edge, total = K.sorted_candidates(ids, tree.coords, tree.cost, target)
    ids = ids[order]
    return SortedCandidates(ids, total[order], edge[order], tree.coords[ids], target)


def choose_best_parent(
    candidates: SortedCandidates, env: Environment, counters: OpCounters | None = None
) -> Candidate | None:
    """First candidate (in cost order) whose segment to the target is collision-free."""
    target = candidates.target
    for k in range(len(candidates)):
        if counters is not None:
            counters.collision += 1
        if env.segment_free(candidates.origins[k], target):
            return candidates[k]
    return None


def insert_vertex(tree: Tree, x: Config, parent: int, edge_length: float | None = None) -> int:
    if edge_length is None:
        edge_length = distance(tree.coords[parent], x)
    return tree._append(x, parent, tree.cost[parent] + edge_length)


def rewire_vertices(
    tree: Tree,
    new_id: int,
    candidates: SortedCandidates,
    env: Environment,
    counters: OpCounters | None = None,
) -> int:
    """Re-parent cheaper-through-``new_id`` candidates; returns how many moved."""
    if len(candidates) == 0:
        return 0
    base = tree.cost[new_id]
    via_new = base + candidates.edge_lengths
    parent_of_new = tree.parent[new_id]
    mask = (via_new < tree.cost[candidates.vertices]) & (candidates.vertices != parent_of_new)
    mask &= candidates.vertices != new_id
    if not mask.any():
        return 0
    x_new = tree.coords[new_id]
    rewired = 0
    for k in np.flatnonzero(mask):
        v = int(candidates.vertices[k])
        c = float(via_new[k])
        # an earlier reparent in this pass may already have lowered v
        if not c < tree.cost[v]:
            continue
        if counters is not None:
            counters.collision += 1
        if env.segment_free(x_new, tree.coords[v]):
            tree.reparent(v, new_id, c)
            rewired += 1
    return rewired


@dataclass(frozen=True)
class PathSolution:
    """Ordered states with the cost recorded when the path was built."""

    states: np.ndarray
    cost: float

    @property
    def length(self) -> float:
        if len(self.states) < 2:
            return 0.0
        seg = np.diff(self.states, axis=0)
        return float(np.sqrt((seg * seg).sum(axis=1)).sum())

    @property
    def start(self) -> Config:
        return self.states[0]

    @property
    def end(self) -> Config:
        return self.states[-1]

    def reversed(self) -> "PathSolution":
        return PathSolution(self.states[::-1].copy(), self.cost)

    def extended(self, x: Config) -> "PathSolution":
        """Path with one more straight segment to ``x``."""
        return PathSolution(np.vstack([self.states, x]), self.cost + distance(self.end, x))


def extract_path(tree: Tree, v: int) -> PathSolution:
    """Root-to-``v`` path following parent links."""
    chain = [v]
    while chain[-1] != ROOT:
        chain.append(int(tree.parent[chain[-1]]))
        if len(chain) > tree.node_count:
            raise UsageError("parent chain does not reach the root")
    chain.reverse()
    return PathSolution(tree.coords[chain].copy(), float(tree.cost[v]))


def concat_paths(pa: PathSolution, pb: PathSolution) -> PathSolution:
    """``pa`` followed by ``pb``; ``pb`` is reversed when it ends at the junction.

    The junction state appears once and costs add.
    """
    junction = pa.end
    if np.array_equal(pb.start, junction):
        tail = pb.states[1:]
    elif np.array_equal(pb.end, junction):
        tail = pb.states[-2::-1]
    else:
        raise UsageError("paths do not share a junction state")
    return PathSolution(np.vstack([pa.states, tail]), pa.cost + pb.cost)
