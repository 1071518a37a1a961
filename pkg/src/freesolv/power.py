"""The power problem u = v^k in S_{r,d}, and cyclic-subgroup membership.

The algorithm compares triviality depths s, t of u and v (the largest
class where each dies), settles the degenerate orderings outright, and in
the remaining case s = t < d reads the only possible exponent k off the
flows of u and v on the common support graph at depth s, then certifies
it through the commutator test backed by Malcev's centralizer theorem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .words import Word, commutator
from .xdigraph import PrefixTree
from .wordproblem import SupportChain, word_problem


@dataclass(frozen=True)
class PowerResult:
    k: int | None  # None means Fail

    @property
    def found(self) -> bool:
        return self.k is not None

    def __repr__(self):
        return f"Found({self.k})" if self.found else "Fail"


FAIL = PowerResult(None)


def _log3_floor(n: int) -> int:
    if n < 1:
        return 0
    e = 0
    while 3 ** (e + 1) <= n:
        e += 1
    return e


def _first_nontrivial_depth(chain: SupportChain, node: int, length: int,
                            cap: int) -> int:
    """Largest s <= cap at which the word (given by its end node) is trivial."""
    s = cap
    for i in range(1, cap + 1):
        if length and 3 ** i > length:
            # shorter than the shortest depth-i relator: nontrivial from here on
            return i - 1
        labels = chain.labels_at(i)
        if labels[node] != labels[0]:
            return i - 1
    return s


def triviality_depth(w: Word, r: int, cap: int, mode: str = "det", rng=None,
                     cube_bound: int | None = None) -> int:
    """Largest s <= cap with w = 1 in S_{r,s}; the empty word reports cap."""
    if r < 1 or cap < 0:
        raise ValueError("need r >= 1 and cap >= 0")
    if len(w) == 0 or cap == 0:
        return cap
    B = None
    if mode == "mc":
        B = cube_bound if cube_bound is not None else max(1, len(w)) ** 3
    tree = PrefixTree([w])
    chain = SupportChain(tree, mode=mode, rng=rng, cube_bound=B)
    end = tree.word_nodes[tuple(w.letters)][-1]
    return _first_nontrivial_depth(chain, end, len(w), cap)


def power_solve(u: Word, v: Word, r: int, d: int, mode: str = "det",
                rng=None, cube_bound: int | None = None) -> PowerResult:
    """Find k with u = v^k in S_{r,d}, or Fail if there is none.

    Deterministic mode is exact.  Monte Carlo mode is unbiased (errors
    both ways are possible) with success probability at least
    (1 - 1/(|u|+|v|))^(1 + log3(|u|+|v|)) at the default anchor cube
    [0, 9(|u|+|v|)^3].
    """
    if r < 1 or d < 0:
        raise ValueError("need r >= 1 and d >= 0")
    n = len(u) + len(v)
    if n == 0:
        return PowerResult(1)  # d <= s, t vacuously: both words die everywhere
    B = None
    if mode == "mc":
        B = cube_bound if cube_bound is not None else 9 * n ** 3
    D = 1 + min(d, _log3_floor(n))
    tree = PrefixTree([u, v, commutator(u, v)])
    chain = SupportChain(tree, mode=mode, rng=rng, cube_bound=B)
    u_nodes = tree.word_nodes[tuple(u.letters)]
    v_nodes = tree.word_nodes[tuple(v.letters)]
    # the cap D never truncates a nonempty word's triviality depth
    # (|w| >= 3^s forces s <= log3 |w| < D); the empty word dies at every
    # depth, so clamp its depth to d directly
    s = d if len(u) == 0 else _first_nontrivial_depth(chain, u_nodes[-1], len(u), D)
    t = d if len(v) == 0 else _first_nontrivial_depth(chain, v_nodes[-1], len(v), D)

    if d <= s and d <= t:
        return PowerResult(1)
    if s < d <= t:
        return FAIL
    if t < d <= s:
        return PowerResult(0)
    if s != t:  # s < t < d or t < s < d
        return FAIL

    # s = t < d: on the depth-s support both flows are circulations and
    # u = v^k forces pi_u = k pi_v, so one nonzero edge of pi_v pins k
    pu = chain.flow_vector(s, u_nodes)
    pv = chain.flow_vector(s, v_nodes)
    nz = np.flatnonzero(pv)
    if len(nz) == 0:
        raise AssertionError("pi_v = 0 would mean v = 1 at depth s+1")
    e = int(nz[0])
    q, rem = divmod(int(pu[e]), int(pv[e]))
    if rem != 0:
        return FAIL
    if not word_problem(commutator(u, v), r, d, mode=mode, rng=rng,
                        cube_bound=B):
        return FAIL
    if s == d - 1 and not np.array_equal(pu, q * pv):
        return FAIL
    return PowerResult(q)


def member_of_cyclic(g: Word, y: Word, r: int, d: int, mode: str = "det",
                     rng=None, cube_bound: int | None = None,
                     memo: dict | None = None) -> bool:
    """Is g in the cyclic subgroup <y> of S_{r,d}?

    Results are memoized on the freely reduced g when a table is passed;
    conjugacy reuses one table across its many membership queries.
    """
    if memo is not None:
        key = (g.letters, y.letters, r, d)
        hit = memo.get(key)
        if hit is not None:
            return hit
    res = power_solve(g, y, r, d, mode=mode, rng=rng,
                      cube_bound=cube_bound).found
    if memo is not None:
        memo[key] = res
    return res
