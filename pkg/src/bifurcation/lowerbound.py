"""Adversarial lower-bound machinery.

Two labs live here: the leaf-isolation pricing game on a complete binary
tree, with its exact minimax value, and an adaptive oracle that answers to
keep the larger candidate set alive while exploration is priced in the
linear-decider cost model (each call costs n steps).
"""

from __future__ import annotations

import random
from array import array
from dataclasses import dataclass

import numpy as np

from .algorithms import ALGORITHMS, _ceil_div, _ceil_sqrt
from .generators import gen_complete_path
from .model import (ANY_NODE, FORK, FOUND, TARGET_LARGER, TARGET_SMALLER,
                    InconsistentOracleError, TreeError, Walker)

STRATEGIES = ("balanced_bisect", "greedy_cheapest", "random")

_MINIMAX_CAP = 12


class GameRuleError(TreeError):
    """A game move violated the query rules."""


def lca_rank(p: int, q: int, h: int) -> int:
    """Height of the lowest common ancestor of two leaf labels in a complete
    binary tree of height h; zero when p == q."""
    top = 1 << h
    if not 0 <= p < top or not 0 <= q < top:
        raise GameRuleError("leaf label out of range for height %d" % h)
    return (p ^ q).bit_length()


def query_price(q: int, history, h: int) -> int:
    """Edges newly traversed to reach leaf q given the queried set: h for the
    first query, afterwards the least lca_rank against any prior query."""
    if q in history:
        raise GameRuleError("duplicate query %d" % q)
    if not 0 <= q < (1 << h):
        raise GameRuleError("leaf label out of range for height %d" % h)
    if not history:
        return h
    return min(lca_rank(q, p, h) for p in history)


class GameState:
    """Active range of the adversarial leaf game on labels 0..2**h - 1."""

    __slots__ = ("h", "size", "x", "y", "queried", "total_price")

    def __init__(self, h: int):
        if h < 1:
            raise GameRuleError("need h >= 1")
        self.h = h
        self.size = 1 << h
        self.x = 0
        self.y = self.size - 1
        self.queried = set()
        self.total_price = 0

    @property
    def active_size(self) -> int:
        return self.y - self.x + 1

    @property
    def flank_left(self):
        q = self.x - 1
        return q if q in self.queried else None

    @property
    def flank_right(self):
        q = self.y + 1
        return q if q in self.queried else None

    def over(self) -> bool:
        return self.x == self.y


def adversary_answer(state: GameState, q: int):
    """Answer a query so that the larger half of the active range survives.

    Mutates the state and returns (answer, price, discarded range or None).
    Out-of-range queries are answered truthfully and discard nothing. The
    game ends when a single label remains; no confirming query is charged.
    """
    if state.over():
        raise GameRuleError("the game is already over")
    price = query_price(q, state.queried, state.h)
    state.queried.add(q)
    state.total_price += price
    x, y = state.x, state.y
    if q < x:
        return TARGET_LARGER, price, None
    if q > y:
        return TARGET_SMALLER, price, None
    a_size = q - x
    b_size = y - q
    if a_size > b_size:
        state.y = q - 1
        return TARGET_SMALLER, price, (q, y)
    state.x = q + 1
    return TARGET_LARGER, price, (x, q)


@dataclass(frozen=True)
class GameStep:
    index: int
    query: int
    price: int
    answer: str
    range_lo: int
    range_hi: int
    discarded: tuple | None


@dataclass(frozen=True)
class Transcript:
    h: int
    strategy: str
    steps: tuple
    total_price: int

    def csv_rows(self):
        yield "step,query,price,answer,range_lo,range_hi"
        for s in self.steps:
            yield "%d,%d,%d,%s,%d,%d" % (s.index, s.query, s.price, s.answer,
                                         s.range_lo, s.range_hi)


def _allowed_queries(state: GameState):
    if state.active_size == 2:
        return [state.x, state.y]
    return list(range(state.x + 1, state.y))


def _validate_move(state: GameState, q: int):
    if q in state.queried:
        raise GameRuleError("repeated query %d" % q)
    if state.active_size > 2:
        if not state.x < q < state.y:
            raise GameRuleError("query %d outside the open active range" % q)
    elif q not in (state.x, state.y):
        raise GameRuleError("query %d outside the active pair" % q)


def play_game(strategy: str, h: int, seed: int = 0) -> Transcript:
    """Run a query strategy against the adversary until the target label is
    isolated.

    Players query strictly inside the active range while it has more than two
    labels, and an endpoint once two remain.
    """
    state = GameState(h)
    rng = random.Random(seed)
    steps = []
    while not state.over():
        if strategy == "balanced_bisect":
            q = (state.x + state.y) // 2
        elif strategy == "greedy_cheapest":
            q = min(_allowed_queries(state),
                    key=lambda c: (query_price(c, state.queried, h), c))
        elif strategy == "random":
            q = rng.choice(_allowed_queries(state))
        else:
            raise GameRuleError("unknown strategy %r" % (strategy,))
        _validate_move(state, q)
        answer, price, discarded = adversary_answer(state, q)
        steps.append(GameStep(len(steps) + 1, q, price, answer,
                              state.x, state.y, discarded))
    return Transcript(h, strategy, tuple(steps), state.total_price)


def _rank_vec(a, b):
    v = np.bitwise_xor(a, b)
    return np.frexp(v.astype(np.float64))[1].astype(np.int64)


_BIG = np.int64(1) << 40


def minimax_price(h: int) -> int:
    """Exact least total price any player can force against the adversary.

    Dynamic program over active ranges: a reachable range [x, y] has exactly
    the flanks x - 1 (when x > 0) and y + 1 (when y < 2**h - 1) queried, and
    the nearest flank prices every future query, so (x, y) is a complete
    state. The full starting range is the lone flankless state; its first
    query always costs h.
    """
    if h < 1:
        raise GameRuleError("need h >= 1")
    if h > _MINIMAX_CAP:
        raise GameRuleError("height %d is past desk scale" % h)
    size = 1 << h
    if size == 2:
        return h
    value = {1: np.zeros(size, dtype=np.int64)}
    for length in range(2, size):
        count = size - length + 1
        xs = np.arange(count, dtype=np.int64)
        left_flank = xs - 1
        right_flank = xs + length
        if length == 2:
            offs = np.array([0, 1], dtype=np.int64)
            children = np.zeros((2, count), dtype=np.int64)
        else:
            offs = np.arange(1, length - 1, dtype=np.int64)
            children = np.stack([
                value[d][:count] if d > length - 1 - d
                else value[length - 1 - d][d + 1:d + 1 + count]
                for d in range(1, length - 1)])
        q = offs[:, None] + xs[None, :]
        price = np.minimum(
            np.where(left_flank >= 0,
                     _rank_vec(q, np.maximum(left_flank, 0)[None, :]), _BIG),
            np.where(right_flank < size,
                     _rank_vec(q, np.minimum(right_flank, size - 1)[None, :]),
                     _BIG))
        value[length] = (price + children).min(axis=0)
    best_total = None
    for d in range(1, size - 1):
        a_size = d
        b_size = size - 1 - d
        if a_size > b_size:
            child = int(value[a_size][0])
        else:
            child = int(value[b_size][d + 1])
        total = h + child
        if best_total is None or total < best_total:
            best_total = total
    return best_total


class _RankSet:
    """Sorted disjoint closed intervals of inorder ranks."""

    __slots__ = ("spans",)

    def __init__(self, lo, hi):
        self.spans = [(lo, hi)] if lo <= hi else []

    def count(self):
        return sum(b - a + 1 for a, b in self.spans)

    def contains(self, r):
        return any(a <= r <= b for a, b in self.spans)

    def count_below(self, r):
        total = 0
        for a, b in self.spans:
            if b < r:
                total += b - a + 1
            elif a < r:
                total += r - a
        return total

    def count_in(self, lo, hi):
        total = 0
        for a, b in self.spans:
            s = max(a, lo)
            e = min(b, hi)
            if s <= e:
                total += e - s + 1
        return total

    def remove_point(self, r):
        out = []
        for a, b in self.spans:
            if a <= r <= b:
                if a <= r - 1:
                    out.append((a, r - 1))
                if r + 1 <= b:
                    out.append((r + 1, b))
            else:
                out.append((a, b))
        self.spans = out

    def keep_below(self, r):
        out = []
        for a, b in self.spans:
            if b < r:
                out.append((a, b))
            elif a < r:
                out.append((a, r - 1))
        self.spans = out

    def keep_above(self, r):
        out = []
        for a, b in self.spans:
            if a > r:
                out.append((a, b))
            elif b > r:
                out.append((r + 1, b))
        self.spans = out

    def delete_range(self, lo, hi):
        out = []
        for a, b in self.spans:
            if b < lo or a > hi:
                out.append((a, b))
                continue
            if a < lo:
                out.append((a, lo - 1))
            if b > hi:
                out.append((hi + 1, b))
        self.spans = out

    def first(self):
        return self.spans[0][0]


def _subtree_rank_spans(tree):
    """Inorder interval [lo, hi] covered by each node's subtree."""
    ranks = tree.inorder_ranks()
    lo = array("i", ranks)
    hi = array("i", ranks)
    parent = tree.parent
    for v in sorted(range(tree.size), key=lambda u: tree.depth[u],
                    reverse=True):
        p = parent[v]
        if p >= 0:
            if lo[v] < lo[p]:
                lo[p] = lo[v]
            if hi[v] > hi[p]:
                hi[p] = hi[v]
    return lo, hi


class AdaptiveOracle:
    """Answers each query so the larger candidate side stays alive.

    Once the player has revealed its fork budget, every still-undiscovered
    fork is demoted to a unary node by deleting the child subtree holding
    fewer surviving candidates. The target is committed as the last surviving
    candidate, so every answer ever given stays consistent with it.
    """

    mode = ANY_NODE

    def __init__(self, tree, fork_budget):
        self.tree = tree
        self.fork_budget = fork_budget
        self.calls = 0
        self.transcript = []
        self.revealed_forks = 0
        self.froze = False
        self.committed = None
        self.walker = None
        self._pending_freeze = False
        self._ranks = tree.inorder_ranks()
        self._cands = _RankSet(0, tree.size - 1)
        self._sub_lo, self._sub_hi = _subtree_rank_spans(tree)

    def attach_walker(self, walker):
        self.walker = walker
        if self._pending_freeze:
            self._pending_freeze = False
            self._freeze()

    def on_reveal(self, node, kind):
        if kind != FORK or self.froze:
            return
        self.revealed_forks += 1
        if self.revealed_forks >= self.fork_budget:
            if self.walker is None:
                self._pending_freeze = True
            else:
                self._freeze()

    def query(self, q):
        self.calls += 1
        r = self._ranks[q]
        cands = self._cands
        total = cands.count()
        if total <= 0:
            raise InconsistentOracleError("the adversary has no candidates left")
        if total == 1 and cands.contains(r):
            self.committed = q
            self.transcript.append((q, FOUND))
            return FOUND
        cands.remove_point(r)
        below = cands.count_below(r)
        above = cands.count() - below
        if below > above:
            cands.keep_below(r)
            answer = TARGET_SMALLER
        else:
            cands.keep_above(r)
            answer = TARGET_LARGER
        self.transcript.append((q, answer))
        return answer

    def _freeze(self):
        self.froze = True
        tree = self.tree
        revealed = self.walker.revealed
        forks = [v for v in range(tree.size)
                 if tree.left[v] >= 0 and tree.right[v] >= 0]
        forks.sort(key=lambda v: tree.depth[v])
        for f in forks:
            if revealed[f] or not self._attached(f):
                continue
            lc = tree.left[f]
            rc = tree.right[f]
            keep_left = (self._cands.count_in(self._sub_lo[lc], self._sub_hi[lc])
                         >= self._cands.count_in(self._sub_lo[rc], self._sub_hi[rc]))
            drop = rc if keep_left else lc
            if keep_left:
                tree.right[f] = -1
            else:
                tree.left[f] = -1
            tree.parent[drop] = -1
            self._cands.delete_range(self._sub_lo[drop], self._sub_hi[drop])

    def _attached(self, v):
        parent = self.tree.parent
        root = self.tree.root
        while v != root:
            p = parent[v]
            if p < 0:
                return False
            v = p
        return True


@dataclass
class AdversaryReport:
    """Outcome of one player run against the adaptive oracle."""

    player: str
    n: int
    t: int
    h: int
    step_len: int
    instance_n: int
    steps: int
    oracle_calls: int
    cost: int
    target: int
    revealed_forks: int
    froze: bool
    transcript: tuple
    tree: object

    def replay_consistent(self) -> bool:
        """Every recorded answer must match the committed target exactly."""
        if self.target is None:
            return False
        ranks = self.tree.inorder_ranks()
        rt = ranks[self.target]
        for q, answer in self.transcript:
            if q == self.target:
                expected = FOUND
            else:
                expected = TARGET_SMALLER if rt < ranks[q] else TARGET_LARGER
            if answer != expected:
                return False
        return True


def adaptive_fork_adversary(n: int, t: int,
                            player: str = "bifurcation") -> AdversaryReport:
    """Play a search algorithm against the adaptive oracle.

    The arena is the complete tree of height ceil(sqrt(t)) with every edge
    stretched into a path of ceil(n / h) edges. Cost charges each oracle call
    at n steps, the linear-decider model.
    """
    if n < 1 or t < 1:
        raise GameRuleError("need n >= 1 and t >= 1")
    if player not in ALGORITHMS:
        raise GameRuleError("unknown player %r" % (player,))
    h = _ceil_sqrt(t)
    step_len = _ceil_div(n, h)
    tree = gen_complete_path(h, step_len)
    oracle = AdaptiveOracle(tree, t)
    walker = Walker(tree, on_reveal=oracle.on_reveal)
    oracle.attach_walker(walker)
    result = ALGORITHMS[player](tree, oracle, walker=walker)
    if oracle.committed is None or result.found != oracle.committed:
        raise InconsistentOracleError(
            "player finished without isolating the committed target")
    tree.target = oracle.committed
    return AdversaryReport(
        player=player, n=n, t=t, h=h, step_len=step_len, instance_n=tree.n,
        steps=result.steps, oracle_calls=result.oracle_calls,
        cost=result.steps + tree.n * result.oracle_calls,
        target=oracle.committed, revealed_forks=oracle.revealed_forks,
        froze=oracle.froze, transcript=tuple(oracle.transcript), tree=tree)
