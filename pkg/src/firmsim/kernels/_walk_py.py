"""Pure-Python interaction walk, used when the compiled kernel is absent.

Consumes no randomness itself: similarity, pair draws, candidate orderings,
and the processing permutation are all precomputed, so this backend and the
compiled one produce bit-identical results.
"""

from __future__ import annotations


def interaction_walk(order, cand, similarity, draws, caps, delta_e) -> int:
    """Run one day's pairing walk; fills delta_e, returns interaction count.

    Agents are processed in `order`; each walks its candidate list while it
    has interaction budget left. A pair is checked at most once per day and
    interacts iff its pair draw lies below its similarity and both sides
    still have budget; the symmetric edge increment equals the similarity.
    The caller's caps array is not modified.
    """
    n = len(order)
    sim = similarity.tolist()
    d = draws.tolist()
    cand_rows = cand.tolist()
    cap = list(caps)
    checked = [[False] * n for _ in range(n)]
    total = 0
    for i in order.tolist():
        if cap[i] == 0:
            continue
        sim_i = sim[i]
        d_i = d[i]
        checked_i = checked[i]
        for j in cand_rows[i]:
            if cap[i] == 0:
                break
            if checked_i[j]:
                continue
            checked_i[j] = True
            checked[j][i] = True
            if cap[j] == 0:
                continue
            if d_i[j] < sim_i[j]:
                w = sim_i[j]
                delta_e[i, j] = w
                delta_e[j, i] = w
                cap[i] -= 1
                cap[j] -= 1
                total += 1
    return total
