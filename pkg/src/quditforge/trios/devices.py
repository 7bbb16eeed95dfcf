"""Coupling graphs, built-in 20-qubit topologies and device error models."""

from __future__ import annotations

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping

import numpy as np

from ..errors import ParseError, UnknownTopology, ValidationError


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class CouplingGraph:
    name: str
    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    edge_success: Mapping[tuple[int, int], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        edges = []
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"self-loop on node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValidationError(f"edge ({u},{v}) outside {self.n_nodes} nodes")
            edges.append(_norm(u, v))
        object.__setattr__(self, "edges", tuple(sorted(set(edges))))
        if self.edge_success is not None:
            succ = {_norm(*e): float(p) for e, p in self.edge_success.items()}
            for e, p in succ.items():
                if e not in self.edges:
                    raise ValidationError(f"success rate for missing edge {e}")
                if not 0 < p <= 1:
                    raise ValidationError(f"edge success {p} outside (0, 1]")
            object.__setattr__(self, "edge_success", succ)
        if self.n_nodes < 1 or len(self._bfs(0)) != self.n_nodes:
            raise ValidationError(f"coupling graph {self.name!r} is not connected")

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n_nodes)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self._edge_set

    @cached_property
    def _edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def _bfs(self, src: int) -> dict[int, int | None]:
        adj = self.adjacency
        parent = {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        return parent

    @cached_property
    def _bfs_tree(self) -> list[dict]:
        return [self._bfs(s) for s in range(self.n_nodes)]

    def weight(self, u: int, v: int) -> float:
        """-log of the edge's two-qubit success rate (1.0 when unknown)."""
        if self.edge_success is None:
            return 1.0
        return -math.log(self.edge_success.get(_norm(u, v), 1.0))

    @cached_property
    def hops(self) -> np.ndarray:
        d = np.full((self.n_nodes, self.n_nodes), -1, dtype=np.int64)
        for s in range(self.n_nodes):
            d[s, s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v in self.adjacency[u]:
                    if d[s, v] < 0:
                        d[s, v] = d[s, u] + 1
                        queue.append(v)
        return d

    def _dijkstra(self, src: int) -> tuple[dict, dict]:
        dist = {src: 0.0}
        parent = {src: None}
        heap = [(0.0, src)]
        done = set()
        while heap:
            du, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v in self.adjacency[u]:
                nd = du + self.weight(u, v)
                if v not in dist or nd < dist[v] - 1e-15:
                    dist[v] = nd
                    parent[v] = u
                    heapq.heappush(heap, (nd, v))
        return dist, parent

    @cached_property
    def weighted_distances(self) -> np.ndarray:
        out = np.zeros((self.n_nodes, self.n_nodes))
        for s in range(self.n_nodes):
            dist, _ = self._dijkstra(s)
            for v, dv in dist.items():
                out[s, v] = dv
        return out

    def distances(self, weighted: bool = False) -> np.ndarray:
        return self.weighted_distances if weighted else self.hops

    def shortest_path(self, src: int, dst: int, weighted: bool = False) -> list[int]:
        """Node list from src to dst; ties go to the lowest-index neighbor."""
        parent = self._dijkstra(src)[1] if weighted else self._bfs_tree[src]
        path = [dst]
        while path[-1] != src:
            path.append(parent[path[-1]])
        return path[::-1]

    def to_json(self) -> dict:
        out = {"name": self.name, "nodes": self.n_nodes, "edges": [list(e) for e in self.edges]}
        if self.edge_success is not None:
            out["edge_success"] = {f"{u}-{v}": p for (u, v), p in sorted(self.edge_success.items())}
        return out


def _grid(rows: int, cols: int) -> list[tuple[int, int]]:
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return edges


JOHANNESBURG_EDGES = [
    (0, 1), (1, 2), (2, 3), (3, 4),
    (5, 6), (6, 7), (7, 8), (8, 9),
    (10, 11), (11, 12), (12, 13), (13, 14),
    (15, 16), (16, 17), (17, 18), (18, 19),
    (0, 5), (4, 9), (5, 10), (7, 12), (9, 14), (10, 15), (14, 19),
]


def _clusters() -> list[tuple[int, int]]:
    edges = []
    for base in (0, 5, 10, 15):
        edges += [(base + i, base + j) for i in range(5) for j in range(i + 1, 5)]
    hubs = (0, 5, 10, 15)
    edges += [(hubs[i], hubs[j]) for i in range(4) for j in range(i + 1, 4)]
    return edges


TOPOLOGIES = {
    "ibmq-johannesburg": lambda: CouplingGraph("ibmq-johannesburg", 20, tuple(JOHANNESBURG_EDGES)),
    "grid-5x4": lambda: CouplingGraph("grid-5x4", 20, tuple(_grid(4, 5))),
    "line-20": lambda: CouplingGraph("line-20", 20, tuple((i, i + 1) for i in range(19))),
    "clusters-5x4": lambda: CouplingGraph("clusters-5x4", 20, tuple(_clusters())),
}


def topology(name: str) -> CouplingGraph:
    try:
        return TOPOLOGIES[name]()
    except KeyError:
        raise UnknownTopology(name) from None


@dataclass(frozen=True)
class DeviceModel:
    """Gate error rates, coherence times (seconds) and gate durations (seconds)."""

    graph: CouplingGraph
    e1: float = 0.0004
    e2: float = 0.0147
    t1: float = 70.87e-6
    t2: float = 72.72e-6
    dt1: float = 0.07e-6
    dt2: float = 0.559e-6

    def __post_init__(self):
        if not (0 <= self.e1 < 1 and 0 <= self.e2 < 1):
            raise ValidationError("gate error rates must lie in [0, 1)")
        if not (self.t1 > 0 and self.t2 > 0):
            raise ValidationError("coherence times must be positive")
        if self.dt1 < 0 or self.dt2 < 0:
            raise ValidationError("durations must be non-negative")

    def improved(self, factor: float) -> "DeviceModel":
        """Gate errors divided and coherence times multiplied by ``factor``."""
        return replace(self, e1=self.e1 / factor, e2=self.e2 / factor,
                       t1=self.t1 * factor, t2=self.t2 * factor)

    def to_json(self) -> dict:
        out = self.graph.to_json()
        out.update(e1=self.e1, e2=self.e2, t1_us=self.t1 * 1e6, t2_us=self.t2 * 1e6,
                   dt1_us=self.dt1 * 1e6, dt2_us=self.dt2 * 1e6)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DeviceModel":
        def need(key):
            if key not in data:
                raise ParseError(f"device file missing field {key!r}")
            return data[key]

        try:
            succ = data.get("edge_success")
            if succ is not None:
                succ = {tuple(int(x) for x in k.split("-")): float(p) for k, p in succ.items()}
            graph = CouplingGraph(
                str(need("name")), int(need("nodes")),
                tuple((int(u), int(v)) for u, v in need("edges")), succ,
            )
            return cls(graph, float(need("e1")), float(need("e2")),
                       float(need("t1_us")) * 1e-6, float(need("t2_us")) * 1e-6,
                       float(need("dt1_us")) * 1e-6, float(need("dt2_us")) * 1e-6)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ParseError(f"bad device value: {exc}") from None


def default_device(name: str = "ibmq-johannesburg") -> DeviceModel:
    return DeviceModel(topology(name))


def load_device(path) -> DeviceModel:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return DeviceModel.from_json(data)


def save_device(device: DeviceModel, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(device.to_json(), fh, indent=1)
        fh.write("\n")
