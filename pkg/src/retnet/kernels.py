"""Inner loops of the community detectors.

All kernels operate on a symmetric CSR adjacency (``indptr``, ``indices``,
``data``) without diagonal entries and mutate label arrays in place.  Scratch
arrays are passed in so that the jitted and interpreted versions allocate
nothing per call.
"""

import numpy as np

from ._jit import kernel


@kernel
def move_sweep(indptr, indices, weights, node_deg, tot, gamma, comm, sizes, free, nfree,
               order, threshold, acc, seen, touched):
    """One local-move sweep over ``order``; returns the number of moves.

    The raw gain of moving ``v`` from community ``a`` to ``b`` is::

        k(v, b) - k(v, a \\ v) - gamma * d(v) * (tot[b] - (tot[a] - d(v)))

    where ``k(v, c)`` sums the adjacency ``weights`` from ``v`` into ``c``,
    ``d`` is ``node_deg`` and ``tot`` the summed ``node_deg`` per community.
    ``gamma = 0`` drops the community-level penalty (used when ``weights``
    already carry per-pair null terms).  ``v`` moves to the candidate with the
    largest gain above ``threshold``; ties go to the smallest community id.
    An empty community, popped from the ``free`` stack (height ``nfree[0]``),
    is a candidate as well but loses ties.
    """
    moves = 0
    for idx in range(order.shape[0]):
        v = order[idx]
        cv = comm[v]
        dv = node_deg[v]
        nt = 0
        for p in range(indptr[v], indptr[v + 1]):
            c = comm[indices[p]]
            if not seen[c]:
                seen[c] = True
                acc[c] = 0.0
                touched[nt] = c
                nt += 1
            acc[c] += weights[p]
        own = 0.0
        if seen[cv]:
            own = acc[cv]
        rest = tot[cv] - dv
        best = cv
        best_gain = threshold
        for t in range(nt):
            c = touched[t]
            if c == cv:
                continue
            g = acc[c] - own - gamma * dv * (tot[c] - rest)
            if g > best_gain or (g == best_gain and best != cv and c < best):
                best = c
                best_gain = g
        for t in range(nt):
            seen[touched[t]] = False
        if best == cv and sizes[cv] > 1 and nfree[0] > 0:
            if -own + gamma * dv * rest > threshold:
                nfree[0] -= 1
                best = free[nfree[0]]
        if best != cv:
            sizes[cv] -= 1
            tot[cv] -= dv
            if sizes[cv] == 0:
                free[nfree[0]] = cv
                nfree[0] += 1
            sizes[best] += 1
            tot[best] += dv
            comm[v] = best
            moves += 1
    return moves


@kernel
def lp_sweep(indptr, indices, weights, labels, order, acc, seen, touched):
    """One asynchronous label-propagation sweep; returns the number of changes.

    Each vertex takes the label carrying the largest total incident weight
    among its neighbours.  The current label is kept when it is among the
    maxima, otherwise the smallest maximal label wins.
    """
    changes = 0
    for idx in range(order.shape[0]):
        v = order[idx]
        start = indptr[v]
        stop = indptr[v + 1]
        if start == stop:
            continue
        nt = 0
        for p in range(start, stop):
            c = labels[indices[p]]
            if not seen[c]:
                seen[c] = True
                acc[c] = 0
                touched[nt] = c
                nt += 1
            acc[c] += weights[p]
        best_w = acc[touched[0]]
        for t in range(1, nt):
            if acc[touched[t]] > best_w:
                best_w = acc[touched[t]]
        cur = labels[v]
        new = cur
        if not (seen[cur] and acc[cur] == best_w):
            new = -1
            for t in range(nt):
                c = touched[t]
                if acc[c] == best_w and (new < 0 or c < new):
                    new = c
        for t in range(nt):
            seen[touched[t]] = False
        if new != cur:
            labels[v] = new
            changes += 1
    return changes


def scratch(n, float_acc=True):
    """Scratch buffers ``(acc, seen, touched)`` for ``n`` labels."""
    acc = np.zeros(n, dtype=np.float64 if float_acc else np.int64)
    return acc, np.zeros(n, dtype=np.bool_), np.zeros(n, dtype=np.int64)
