"""Deterministic force-directed layout.

Spring-electrical model: attraction d^2/K along edges, repulsion C*K^2/d
between all pairs approximated by a Barnes-Hut quadtree, adaptive step-size
cooling. Sequential compiled kernels plus a seeded init make runs bitwise
reproducible for fixed (graph, seed, iterations, params).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numba import njit

from .graph import Graph

__all__ = ["LayoutPositions", "force_layout"]

_MAX_DEPTH = 16
_REPULSION_C = 0.2
_COOL_T = 0.9


@dataclass(frozen=True)
class LayoutPositions:
    xy: np.ndarray
    seed: int
    iterations: int

    def to_json_dict(self) -> dict:
        return {"positions": self.xy.tolist(), "seed": self.seed}


@njit(cache=True)
def _build_tree(
    px, py, child, cx, cy, half, mass, comx, comy, head, nxt, root_cx, root_cy, root_half
):
    """Insert all points into a quadtree stored in flat arrays.

    Leaves hold single points except at the depth cap, where they hold a
    bucket (linked list via nxt). Returns the number of nodes used, or -1
    if capacity was exceeded.
    """
    n = px.shape[0]
    cap = cx.shape[0]
    used = 1
    child[0, 0] = -1
    child[0, 1] = -1
    child[0, 2] = -1
    child[0, 3] = -1
    cx[0] = root_cx
    cy[0] = root_cy
    half[0] = root_half
    mass[0] = 0
    comx[0] = 0.0
    comy[0] = 0.0
    head[0] = -1
    for i in range(n):
        node = 0
        depth = 0
        while True:
            mass[node] += 1
            comx[node] += px[i]
            comy[node] += py[i]
            is_internal = (
                child[node, 0] >= 0
                or child[node, 1] >= 0
                or child[node, 2] >= 0
                or child[node, 3] >= 0
            )
            if not is_internal:
                if head[node] < 0:
                    head[node] = i
                    nxt[i] = -1
                    break
                if depth >= _MAX_DEPTH:
                    nxt[i] = head[node]
                    head[node] = i
                    break
                # split: push the resident point down, then retry this node
                j = head[node]
                head[node] = -1
                q = 0
                if px[j] >= cx[node]:
                    q += 1
                if py[j] >= cy[node]:
                    q += 2
                if used >= cap:
                    return -1
                c = used
                used += 1
                child[c, 0] = -1
                child[c, 1] = -1
                child[c, 2] = -1
                child[c, 3] = -1
                h = half[node] / 2.0
                cx[c] = cx[node] + (h if q % 2 == 1 else -h)
                cy[c] = cy[node] + (h if q >= 2 else -h)
                half[c] = h
                mass[c] = 1
                comx[c] = px[j]
                comy[c] = py[j]
                head[c] = j
                nxt[j] = -1
                child[node, q] = c
                # fall through: loop re-examines `node`, now internal,
                # without re-adding i's mass
                mass[node] -= 1
                comx[node] -= px[i]
                comy[node] -= py[i]
                continue
            q = 0
            if px[i] >= cx[node]:
                q += 1
            if py[i] >= cy[node]:
                q += 2
            nx = child[node, q]
            if nx < 0:
                if used >= cap:
                    return -1
                c = used
                used += 1
                child[c, 0] = -1
                child[c, 1] = -1
                child[c, 2] = -1
                child[c, 3] = -1
                h = half[node] / 2.0
                cx[c] = cx[node] + (h if q % 2 == 1 else -h)
                cy[c] = cy[node] + (h if q >= 2 else -h)
                half[c] = h
                mass[c] = 0
                comx[c] = 0.0
                comy[c] = 0.0
                head[c] = -1
                child[node, q] = c
                nx = c
            node = nx
            depth += 1
    return used


@njit(cache=True)
def _forces(
    px,
    py,
    esrc,
    edst,
    K,
    theta,
    child,
    cx,
    cy,
    half,
    mass,
    comx,
    comy,
    head,
    nxt,
    fx,
    fy,
    stack,
):
    n = px.shape[0]
    ck2 = _REPULSION_C * K * K
    theta2 = theta * theta
    eps = 1e-12
    for i in range(n):
        fx[i] = 0.0
        fy[i] = 0.0
        sp_ = 0
        stack[sp_] = 0
        sp_ += 1
        while sp_ > 0:
            sp_ -= 1
            node = stack[sp_]
            if mass[node] == 0:
                continue
            is_internal = (
                child[node, 0] >= 0
                or child[node, 1] >= 0
                or child[node, 2] >= 0
                or child[node, 3] >= 0
            )
            mx = comx[node] / mass[node]
            my = comy[node] / mass[node]
            dx = px[i] - mx
            dy = py[i] - my
            d2 = dx * dx + dy * dy + eps
            width = 2.0 * half[node]
            if is_internal and width * width >= theta2 * d2:
                for q in range(4):
                    c = child[node, q]
                    if c >= 0:
                        stack[sp_] = c
                        sp_ += 1
                continue
            if not is_internal:
                j = head[node]
                while j >= 0:
                    if j != i:
                        ddx = px[i] - px[j]
                        ddy = py[i] - py[j]
                        dd2 = ddx * ddx + ddy * ddy + eps
                        f = ck2 / dd2
                        fx[i] += f * ddx
                        fy[i] += f * ddy
                    j = nxt[j]
            else:
                f = ck2 * mass[node] / d2
                fx[i] += f * dx
                fy[i] += f * dy
    # attraction along edges: magnitude d^2/K toward the neighbor
    for e in range(esrc.shape[0]):
        u = esrc[e]
        v = edst[e]
        dx = px[v] - px[u]
        dy = py[v] - py[u]
        d = np.sqrt(dx * dx + dy * dy)
        if d > 0.0:
            f = d / K  # (d^2/K) / d premultiplies the (dx, dy) vector
            fx[u] += f * dx
            fy[u] += f * dy
            fx[v] -= f * dx
            fy[v] -= f * dy


@njit(cache=True)
def _step(px, py, fx, fy, step):
    n = px.shape[0]
    moved = 0.0
    energy = 0.0
    for i in range(n):
        f2 = fx[i] * fx[i] + fy[i] * fy[i]
        energy += f2
        if f2 > 0.0:
            f = np.sqrt(f2)
            px[i] += step * fx[i] / f
            py[i] += step * fy[i] / f
            moved += step
    return energy, moved


def _edge_pairs(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    adj = graph.adjacency("all")
    upper = sp.triu(adj, k=1).tocoo()
    return upper.row.astype(np.int64), upper.col.astype(np.int64)


def force_layout(
    graph: Graph,
    iterations: int = 500,
    seed: int = 42,
    theta: float = 0.9,
    optimal_distance: float | None = None,
    progress=None,
) -> LayoutPositions:
    """Deterministic Barnes-Hut spring-electrical layout.

    Output is centered at the origin and scaled to unit RMS radius.
    optimal_distance None picks the equilibrium edge length automatically
    (1.0; absolute scale washes out in the normalization). progress, when
    given, is called as progress(done_iterations, total) every few
    iterations; raising from it aborts the run.
    """
    n = graph.n
    if n < 1:
        raise ValueError("layout needs at least one node")
    if n == 1:
        return LayoutPositions(np.zeros((1, 2)), seed, iterations)
    K = 1.0 if optimal_distance is None else float(optimal_distance)
    rng = np.random.default_rng(seed)
    side = np.sqrt(n) * K
    pos = rng.random((n, 2)) * side
    px = np.ascontiguousarray(pos[:, 0])
    py = np.ascontiguousarray(pos[:, 1])
    esrc, edst = _edge_pairs(graph)

    cap = 32 + n * (_MAX_DEPTH + 4)
    child = np.empty((cap, 4), dtype=np.int64)
    cx = np.empty(cap)
    cy = np.empty(cap)
    half = np.empty(cap)
    mass = np.empty(cap, dtype=np.int64)
    comx = np.empty(cap)
    comy = np.empty(cap)
    head = np.empty(cap, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    fx = np.empty(n)
    fy = np.empty(n)
    stack = np.empty(4 * _MAX_DEPTH + 64, dtype=np.int64)

    step = K
    prev_energy = np.inf
    progress_streak = 0
    for it in range(iterations):
        root_cx = (px.min() + px.max()) / 2.0
        root_cy = (py.min() + py.max()) / 2.0
        root_half = max(px.max() - px.min(), py.max() - py.min()) / 2.0 + 1e-9
        used = _build_tree(
            px, py, child, cx, cy, half, mass, comx, comy, head, nxt,
            root_cx, root_cy, root_half,
        )
        if used < 0:
            raise RuntimeError("quadtree capacity exceeded")
        _forces(
            px, py, esrc, edst, K, theta,
            child, cx, cy, half, mass, comx, comy, head, nxt, fx, fy, stack,
        )
        energy, moved = _step(px, py, fx, fy, step)
        # adaptive cooling: shrink on setbacks, cautiously grow on streaks
        if energy < prev_energy:
            progress_streak += 1
            if progress_streak >= 5:
                progress_streak = 0
                step /= _COOL_T
        else:
            progress_streak = 0
            step *= _COOL_T
        prev_energy = energy
        if progress is not None and (it + 1) % 25 == 0:
            progress(it + 1, iterations)
        if moved / n < 1e-6 * K:
            break

    xy = np.column_stack([px, py])
    xy -= xy.mean(axis=0)
    rms = float(np.sqrt((xy**2).sum(axis=1).mean()))
    if rms > 1e-12:
        xy /= rms
    return LayoutPositions(xy, seed, iterations)
