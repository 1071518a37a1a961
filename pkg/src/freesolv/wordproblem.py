"""Deterministic and Monte Carlo word problem via distinguisher chains.

A distinguisher at depth d labels the prefixes of a word so that equal
labels mean equal group elements in S_{r,d}.  Starting from the constant
labeling (depth 0, the trivial group), each refinement step

  1. numbers the edges of the quotient support graph at depth d-1,
  2. walks the prefixes, maintaining the flow vector incrementally,
  3. ranks the per-prefix flow data,

and the ranks are the labels at depth d.  The deterministic step ranks
whole flow tuples lexicographically; the Monte Carlo step ranks exact
squared distances to a random anchor point, trading a small one-sided
error for quasi-linear work.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .words import Word
from .xdigraph import PrefixTree, number_tree_edges

DEFAULT_MAX_LEN = 1 << 20

# below this many tree nodes the deterministic step materializes plain
# tuples; above it, a batched column-wise radix refinement is used
_TUPLE_PATH_MAX = 512
_BATCH_COLUMNS = 16


class LengthGuardError(ValueError):
    """Input exceeds the configured length guard."""


@dataclass(frozen=True)
class Distinguisher:
    """Prefix labeling of a word at some solvability depth.

    For labelings produced by the deterministic chain, equal labels are
    exactly equality of prefixes in S_{r,depth}.  Randomized candidates
    satisfy only the coarse direction: truly equal prefixes always share
    a label.
    """

    word: Word
    depth: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.word) + 1:
            raise ValueError("need one label per prefix, |w|+1 in total")

    def says_trivial(self) -> bool:
        return self.labels[0] == self.labels[-1]


@dataclass(frozen=True)
class Fingerprint:
    """Anchor point and exact squared distances of the prefix flows to it."""

    anchor: tuple[int, ...]
    d2: tuple[int, ...]
    bound: int


def nu0(w: Word) -> Distinguisher:
    """The depth-0 distinguisher: S_{r,0} is trivial, everything is equal."""
    return Distinguisher(w, 0, (0,) * (len(w) + 1))


class SupportChain:
    """Distinguisher chain over the prefix tree of a word set.

    Shared engine for the word, power and conjugacy solvers.  Labels are
    computed lazily depth by depth and cached together with the canonical
    edge numbering of each quotient support graph.
    """

    def __init__(self, tree: PrefixTree, mode: str = "det", rng=None,
                 cube_bound: int | None = None):
        if mode not in ("det", "mc"):
            raise ValueError("mode must be 'det' or 'mc'")
        if mode == "mc" and (rng is None or cube_bound is None):
            raise ValueError("Monte Carlo mode needs rng and cube_bound")
        self.tree = tree
        self.V = len(tree)
        self.mode = mode
        self.rng = rng
        self.cube_bound = cube_bound
        self._parents = np.array(tree.parents, dtype=np.int64)
        self._letters = np.array(tree.letters, dtype=np.int64)
        self._labels: list[np.ndarray] = [np.zeros(self.V, dtype=np.int64)]
        self._numberings: dict[int, tuple[int, np.ndarray, np.ndarray]] = {}
        self._euler: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
        self.last_fingerprint: Fingerprint | None = None
        self.want_fingerprint = False

    # -- tree traversal ------------------------------------------------

    def _euler_tour(self):
        """Steps (node, +-1) of a depth-first walk; +1 enters, -1 leaves."""
        if self._euler is None:
            kids = self.tree.children()
            nodes: list[int] = []
            downs: list[int] = []
            entry = np.zeros(self.V, dtype=np.int64)
            stack: list[tuple[int, bool]] = [(0, True)]
            while stack:
                v, entering = stack.pop()
                if entering:
                    if v:
                        nodes.append(v)
                        downs.append(1)
                        entry[v] = len(nodes)  # index into 1-offset cumsums
                    stack.append((v, False))
                    for c in reversed(kids[v]):
                        stack.append((c, True))
                elif v:
                    nodes.append(v)
                    downs.append(-1)
            self._euler = (np.array(nodes, dtype=np.int64),
                           np.array(downs, dtype=np.int64), entry)
        return self._euler

    # -- quotient edge numbering ----------------------------------------

    def numbering_at(self, depth: int):
        """Canonical edge numbering of the quotient graph at this depth.

        Returns (m, eid, dirs): per non-root node, the edge its parent
        edge maps to and the sign against canonical orientation.  Matches
        xdigraph.number_tree_edges, vectorized.
        """
        if depth not in self._numberings:
            raw = self.labels_at(depth)
            # densify to 0..C-1; monotone, so canonical order is unchanged
            _, labels = np.unique(raw, return_inverse=True)
            labels = labels.astype(np.int64)
            p = self._parents[1:]
            a = labels[p]
            b = labels[1:]
            s = self._letters[1:]
            r_max = int(np.abs(s).max(initial=1))
            lab_stride = int(labels.max(initial=0)) + 1
            code_s = np.where(s > 0, s, r_max + np.abs(s))
            code_r = np.where(-s > 0, -s, r_max + np.abs(s))
            fwd = (a * lab_stride + b) * (2 * r_max + 2) + code_s
            rev = (b * lab_stride + a) * (2 * r_max + 2) + code_r
            canon = np.minimum(fwd, rev)
            dirs1 = np.where(fwd <= rev, 1, -1).astype(np.int64)
            _, inv = np.unique(canon, return_inverse=True)
            eid = np.zeros(self.V, dtype=np.int64)
            eid[1:] = inv.astype(np.int64)
            dirs = np.zeros(self.V, dtype=np.int64)
            dirs[1:] = dirs1
            m = int(inv.max(initial=-1)) + 1
            self._numberings[depth] = (m, eid, dirs)
        return self._numberings[depth]

    def flow_vector(self, depth: int, nodes: Sequence[int]) -> np.ndarray:
        """Flow of a root path (node list) on the depth-d quotient graph."""
        m, eid, dirs = self.numbering_at(depth)
        vec = np.zeros(m, dtype=np.int64)
        idx = np.asarray(nodes[1:], dtype=np.int64)
        np.add.at(vec, eid[idx], dirs[idx])
        return vec

    # -- refinement ------------------------------------------------------

    def labels_at(self, depth: int) -> np.ndarray:
        while len(self._labels) <= depth:
            prev_depth = len(self._labels) - 1
            if self.mode == "det":
                nxt = self._refine_det(prev_depth)
            else:
                nxt = self._refine_mc(prev_depth)
            self._labels.append(nxt)
        return self._labels[depth]

    def _refine_det(self, depth: int) -> np.ndarray:
        m, eid, dirs = self.numbering_at(depth)
        if self.V <= _TUPLE_PATH_MAX:
            return self._det_tuples(m, eid, dirs)
        return self._det_batched(m, eid, dirs)

    def _det_tuples(self, m, eid, dirs) -> np.ndarray:
        """Materialize per-node flow tuples and rank them lexicographically."""
        nodes, downs, _ = self._euler_tour()
        cur = [0] * m
        snaps: list[tuple] = [()] * self.V
        snaps[0] = tuple(cur)
        eid_l, dirs_l = eid.tolist(), dirs.tolist()
        for v, down in zip(nodes.tolist(), downs.tolist()):
            j = eid_l[v]
            cur[j] += dirs_l[v] * down
            if down > 0:
                snaps[v] = tuple(cur)
        rank = {t: i for i, t in enumerate(sorted(set(snaps)))}
        return np.array([rank[t] for t in snaps], dtype=np.int64)

    def _det_batched(self, m, eid, dirs) -> np.ndarray:
        """Rank flow tuples without materializing them all at once.

        Column-wise most-significant-first radix refinement: the group id
        carried across batches is the lexicographic rank over the columns
        consumed so far.  Once all ranks are distinct they are final (the
        remaining columns can only break ties that no longer exist), so
        later batches skip the sort; the column scan itself always runs,
        keeping the Theta(V * m) work profile of the tuple path.
        """
        nodes, downs, entry = self._euler_tour()
        S = len(nodes)
        V = self.V
        K = _BATCH_COLUMNS
        step_eid = eid[nodes]
        step_delta = (dirs[nodes] * downs).astype(np.int32)
        by_edge = np.argsort(step_eid, kind="stable")
        sorted_eid = step_eid[by_edge]
        bounds = np.searchsorted(sorted_eid, np.arange(m + 1))
        group = np.zeros(V, dtype=np.int64)
        # flow values fit int32 (|value| <= |w| < 2^20); one row per batch
        # column so the cumsums run over contiguous memory
        delta = np.zeros(K * (S + 1), dtype=np.int32)  # touched at events only
        csum = np.empty((K, S + 1), dtype=np.int32)
        order = np.arange(V, dtype=np.int64)
        discrete = V == 1
        for lo in range(0, m, K):
            hi = min(lo + K, m)
            kk = hi - lo
            idx = by_edge[bounds[lo]:bounds[hi]]
            flat = (sorted_eid[bounds[lo]:bounds[hi]] - lo) * (S + 1) + (idx + 1)
            delta[flat] = step_delta[idx]
            np.cumsum(delta.reshape(K, S + 1), axis=1, out=csum)
            arr = csum[:kk, :][:, entry]  # (kk, V) flow values per node
            delta[flat] = 0
            if discrete:
                continue
            # rows stay ordered by current group; only tied runs need sorting
            a_o = arr[:, order]
            g_o = group[order]
            cut = np.flatnonzero(g_o[1:] != g_o[:-1]) + 1
            starts = np.concatenate(([0], cut))
            ends = np.concatenate((cut, [V]))
            for s, e in zip(starts.tolist(), ends.tolist()):
                if e - s < 2:
                    continue
                sub = np.lexsort(tuple(a_o[k, s:e] for k in range(kk - 1, -1, -1)))
                order[s:e] = order[s:e][sub]
                a_o[:, s:e] = a_o[:, s:e][:, sub]
            neq = (g_o[1:] != g_o[:-1]) | (a_o[:, 1:] != a_o[:, :-1]).any(axis=0)
            ranks = np.empty(V, dtype=np.int64)
            ranks[0] = 0
            np.cumsum(neq, out=ranks[1:])
            group[order] = ranks
            discrete = int(ranks[-1]) + 1 == V
        return group

    def _refine_mc(self, depth: int) -> np.ndarray:
        """Rank exact squared distances from a random anchor (one per node).

        The running distance follows the +-(2|a|+1) single-component
        update.  The vectorized path tracks the distance offset from its
        start value in two 32-bit limbs (ranks ignore the shared start);
        the plain path uses Python integers and also materializes the
        Fingerprint.  Both produce identical labels for the same stream.
        """
        m, eid, dirs = self.numbering_at(depth)
        B = self.cube_bound
        if (self.V <= _TUPLE_PATH_MAX or B > (1 << 59)
                or self.want_fingerprint):
            return self._mc_python(m, eid, dirs, B)
        return self._mc_vectorized(m, eid, dirs, B)

    def _mc_python(self, m, eid, dirs, B) -> np.ndarray:
        rng = self.rng
        anchor = [rng.randrange(B + 1) for _ in range(m)]
        rel = [-a for a in anchor]  # flow minus anchor, flow starts at zero
        d2 = sum(a * a for a in anchor)
        out: list[int] = [0] * self.V
        out[0] = d2
        nodes, downs, _ = self._euler_tour()
        eid_l, dirs_l = eid.tolist(), dirs.tolist()
        for v, down in zip(nodes.tolist(), downs.tolist()):
            j = eid_l[v]
            delta = dirs_l[v] * down
            old = rel[j]
            rel[j] = old + delta
            d2 += 2 * old * delta + 1
            if down > 0:
                out[v] = d2
        self.last_fingerprint = Fingerprint(tuple(anchor), tuple(out), B)
        rank = {x: i for i, x in enumerate(sorted(set(out)))}
        return np.array([rank[x] for x in out], dtype=np.int64)

    def _mc_vectorized(self, m, eid, dirs, B) -> np.ndarray:
        nodes, downs, entry = self._euler_tour()
        S = len(nodes)
        rng = self.rng
        anchor = np.array([rng.randrange(B + 1) for _ in range(m)],
                          dtype=np.int64)
        step_eid = eid[nodes]
        step_dir = dirs[nodes] * downs
        order = np.argsort(step_eid, kind="stable")
        se = step_eid[order]
        sd = step_dir[order]
        # exclusive per-edge traversal counts before each step
        incl = np.cumsum(sd)
        excl = incl - sd
        starts = np.searchsorted(se, np.arange(m + 1))
        sizes = np.diff(starts)
        base = np.repeat(excl[starts[:-1]], sizes)
        pre = excl - base
        rel_before = pre - anchor[se]
        delta_sorted = 2 * sd * rel_before + 1
        delta = np.empty(S, dtype=np.int64)
        delta[order] = delta_sorted
        # two-limb exact cumulative sums: |delta| <= 2(B + S) + 1 < 2^61
        hi = delta >> 32
        lo = delta & 0xFFFFFFFF
        chi = np.concatenate(([0], np.cumsum(hi)))
        clo = np.concatenate(([0], np.cumsum(lo)))
        hi_at = chi[entry] + (clo[entry] >> 32)
        lo_at = clo[entry] & 0xFFFFFFFF
        order2 = np.lexsort((lo_at, hi_at))
        h_s, l_s = hi_at[order2], lo_at[order2]
        neq = (h_s[1:] != h_s[:-1]) | (l_s[1:] != l_s[:-1])
        ranks = np.empty(self.V, dtype=np.int64)
        ranks[0] = 0
        np.cumsum(neq, out=ranks[1:])
        labels = np.empty(self.V, dtype=np.int64)
        labels[order2] = ranks
        return labels


# -- single-word public operations ---------------------------------------


def _word_chain(w: Word, labels: Sequence[int], mode: str, rng=None,
                cube_bound: int | None = None) -> SupportChain:
    tree = PrefixTree([w])
    chain = SupportChain(tree, mode=mode, rng=rng, cube_bound=cube_bound)
    seeded = np.asarray(labels, dtype=np.int64)
    if seeded.shape != (len(tree),):
        raise ValueError("labeling length must be |w|+1")
    chain._labels = [seeded]
    return chain


def refine_deterministic(w: Word, nu_prev: Distinguisher) -> Distinguisher:
    """One exact refinement step: depth d-1 labels to depth d labels."""
    chain = _word_chain(w, nu_prev.labels, "det")
    new = chain.labels_at(1)
    return Distinguisher(w, nu_prev.depth + 1, tuple(int(x) for x in new))


def refine_randomized(w: Word, nu_prev: Distinguisher, rng,
                      cube_bound: int | None = None) -> Distinguisher:
    """One Monte Carlo refinement step; the result is a candidate.

    With anchor components uniform on [0, cube_bound] the candidate is a
    true distinguisher with probability at least 1 - 1/|w| for the
    default bound |w|^3.
    """
    B = cube_bound if cube_bound is not None else max(1, len(w)) ** 3
    chain = _word_chain(w, nu_prev.labels, "mc", rng=rng, cube_bound=B)
    new = chain.labels_at(1)
    return Distinguisher(w, nu_prev.depth + 1, tuple(int(x) for x in new))


def fingerprint(w: Word, nu_prev: Distinguisher, rng,
                cube_bound: int | None = None) -> Fingerprint:
    """Anchor and per-prefix squared distances for one randomized step."""
    B = cube_bound if cube_bound is not None else max(1, len(w)) ** 3
    chain = _word_chain(w, nu_prev.labels, "mc", rng=rng, cube_bound=B)
    chain.want_fingerprint = True
    chain.labels_at(1)
    return chain.last_fingerprint


def word_problem(w: Word, r: int, d: int, mode: str = "det", rng=None,
                 cube_bound: int | None = None,
                 max_len: int = DEFAULT_MAX_LEN) -> bool:
    """Decide w = 1 in S_{r,d}.

    Deterministic mode is always correct.  Monte Carlo mode is
    false-biased: trivial words always come back True; a nontrivial word
    is reported False with probability at least (1 - 1/|w|)^(log3 |w|)
    at the default cube bound |w|^3.
    """
    if r < 1 or d < 0:
        raise ValueError("need r >= 1 and d >= 0")
    if len(w) >= max_len:
        raise LengthGuardError(f"|w| = {len(w)} exceeds guard {max_len}")
    if len(w) == 0 or d == 0:
        return True
    if 3 ** d > len(w):
        # the shortest nontrivial relator of S_{r,d} has length >= 3^d
        return False
    if mode == "mc":
        B = cube_bound if cube_bound is not None else len(w) ** 3
    else:
        B = None
    chain = SupportChain(PrefixTree([w]), mode=mode, rng=rng, cube_bound=B)
    labels = chain.labels_at(d)
    return bool(labels[0] == labels[-1])
