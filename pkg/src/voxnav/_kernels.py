"""Numba kernels for line-of-sight tests against a dense blocked mask.

Coordinates are in voxel units, already shifted into the mask's array frame.
The traversal semantics (tie-breaks included) mirror geometry.traverse_ray
exactly; the equivalence is covered by property tests.
"""

import numpy as np
from numba import njit

_INF = 1e300


@njit(cache=True)
def segment_blocked(blocked, x0, y0, z0, x1, y1, z1):
    """True if the segment crosses any blocked (or out-of-mask) voxel."""
    i = int(np.floor(x0))
    j = int(np.floor(y0))
    k = int(np.floor(z0))
    ie = int(np.floor(x1))
    je = int(np.floor(y1))
    ke = int(np.floor(z1))
    ni, nj, nk = blocked.shape

    if i < 0 or i >= ni or j < 0 or j >= nj or k < 0 or k >= nk or blocked[i, j, k]:
        return True

    dx = x1 - x0
    dy = y1 - y0
    dz = z1 - z0
    step_x = 1 if dx > 0.0 else -1
    step_y = 1 if dy > 0.0 else -1
    step_z = 1 if dz > 0.0 else -1
    if dx > 0.0:
        tmax_x = (i + 1.0 - x0) / dx
        tdelta_x = 1.0 / dx
    elif dx < 0.0:
        tmax_x = (i - x0) / dx
        tdelta_x = -1.0 / dx
    else:
        tmax_x = _INF
        tdelta_x = _INF
    if dy > 0.0:
        tmax_y = (j + 1.0 - y0) / dy
        tdelta_y = 1.0 / dy
    elif dy < 0.0:
        tmax_y = (j - y0) / dy
        tdelta_y = -1.0 / dy
    else:
        tmax_y = _INF
        tdelta_y = _INF
    if dz > 0.0:
        tmax_z = (k + 1.0 - z0) / dz
        tdelta_z = 1.0 / dz
    elif dz < 0.0:
        tmax_z = (k - z0) / dz
        tdelta_z = -1.0 / dz
    else:
        tmax_z = _INF
        tdelta_z = _INF

    max_steps = abs(ie - i) + abs(je - j) + abs(ke - k)
    for _ in range(max_steps):
        if i == ie and j == je and k == ke:
            break
        if tmax_x <= tmax_y and tmax_x <= tmax_z:
            i += step_x
            tmax_x += tdelta_x
        elif tmax_y <= tmax_z:
            j += step_y
            tmax_y += tdelta_y
        else:
            k += step_z
            tmax_z += tdelta_z
        if i < 0 or i >= ni or j < 0 or j >= nj or k < 0 or k >= nk or blocked[i, j, k]:
            return True
    return False


@njit(cache=True)
def sight_blocked(blocked, x0, y0, z0, x1, y1, z1):
    """Direction-independent segment test: blocked if either traversal
    direction crosses a blocked voxel.

    A single directed walk resolves exact face/edge/corner ties by axis
    priority, so the two directions can visit different side voxels; checking
    both keeps the relation symmetric and conservatively rejects segments
    that graze a blocked corner.
    """
    if segment_blocked(blocked, x0, y0, z0, x1, y1, z1):
        return True
    return segment_blocked(blocked, x1, y1, z1, x0, y0, z0)


@njit(cache=True)
def visible_from_all(blocked, cx, cy, cz, centers):
    """True if the point sees every row of centers through free voxels."""
    for n in range(centers.shape[0]):
        if sight_blocked(blocked, cx, cy, cz, centers[n, 0], centers[n, 1], centers[n, 2]):
            return False
    return True


@njit(cache=True)
def filter_visible(blocked, candidates, centers):
    """Per-candidate visibility mask against all centers."""
    m = candidates.shape[0]
    keep = np.zeros(m, dtype=np.uint8)
    for c in range(m):
        if visible_from_all(blocked, candidates[c, 0], candidates[c, 1], candidates[c, 2], centers):
            keep[c] = 1
    return keep


@njit(cache=True)
def mutually_visible_subset(blocked, candidates):
    """Greedy mutual-visibility acceptance over candidates in given order."""
    m = candidates.shape[0]
    keep = np.zeros(m, dtype=np.uint8)
    accepted = np.empty((m, 3), dtype=np.float64)
    count = 0
    for c in range(m):
        ok = True
        for a in range(count):
            if sight_blocked(
                blocked,
                candidates[c, 0], candidates[c, 1], candidates[c, 2],
                accepted[a, 0], accepted[a, 1], accepted[a, 2],
            ):
                ok = False
                break
        if ok:
            accepted[count, 0] = candidates[c, 0]
            accepted[count, 1] = candidates[c, 1]
            accepted[count, 2] = candidates[c, 2]
            count += 1
            keep[c] = 1
    return keep


@njit(cache=True)
def all_pairs_visible(blocked, centers):
    """Index of the first mutually blocked pair, or (-1, -1) if none."""
    n = centers.shape[0]
    for a in range(n):
        for b in range(a + 1, n):
            if sight_blocked(
                blocked,
                centers[a, 0], centers[a, 1], centers[a, 2],
                centers[b, 0], centers[b, 1], centers[b, 2],
            ):
                return a, b
    return -1, -1
