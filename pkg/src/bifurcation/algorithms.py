"""Search procedures over implicit trees: trimming, halving, staged
bounded-depth exploration, and two baselines, all instrumented.

All movement goes through the Walker (one step per edge), and all tree shape
knowledge lives in an ExploredTree mirroring the ids the walker has entered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (ANY_NODE, DIR_LEFT, DIR_ONLY, DIR_PARENT, DIR_RIGHT,
                    FORK, FOUND, LEAF, LEFT, TARGET_LARGER, TARGET_SMALLER,
                    InconsistentOracleError, OracleModeError, TreeError,
                    Walker)


def _ceil_sqrt(x: int) -> int:
    r = math.isqrt(x)
    return r if r * r == x else r + 1


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


class ExploredTree:
    """The algorithm's partial copy of the instance.

    Mirrors instance ids. A stub is a node proven not to hold the target in
    its subtree; stubs stay in place as markers but their explored subtrees
    are deleted, and they are excluded from node and leaf counts.
    """

    __slots__ = ("root", "kind", "parent", "left", "right", "depth", "stubs")

    def __init__(self, root: int, root_kind: str):
        self.root = root
        self.kind = {root: root_kind}
        self.parent = {root: -1}
        self.left = {}
        self.right = {}
        self.depth = {root: 0}
        self.stubs = set()

    @property
    def node_count(self) -> int:
        """Non-stub nodes currently explored."""
        return len(self.kind) - len(self.stubs)

    def add_child(self, parent: int, side: str, child: int, kind: str):
        self.kind[child] = kind
        self.parent[child] = parent
        self.depth[child] = self.depth[parent] + 1
        if side == LEFT:
            self.left[parent] = child
        else:
            self.right[parent] = child

    def path_to_root(self, u: int):
        """Ids from u up to the root, inclusive."""
        path = [u]
        parent = self.parent
        while True:
            p = parent[path[-1]]
            if p < 0:
                return path
            path.append(p)

    def inorder_below(self, top: int):
        """Non-stub ids of top's explored subtree, in inorder."""
        nodes = []
        left = self.left
        right = self.right
        stubs = self.stubs
        stack = []
        cur = top
        while stack or cur is not None:
            while cur is not None:
                stack.append(cur)
                cur = left.get(cur)
            cur = stack.pop()
            if cur not in stubs:
                nodes.append(cur)
            cur = right.get(cur)
        return nodes

    def inorder_nodes(self):
        return self.inorder_below(self.root)

    def inorder_nodes_and_leaves(self):
        """Non-stub ids in inorder, plus the subset with no explored children."""
        nodes = []
        leaves = []
        left = self.left
        right = self.right
        stubs = self.stubs
        stack = []
        cur = self.root
        while stack or cur is not None:
            while cur is not None:
                stack.append(cur)
                cur = left.get(cur)
            cur = stack.pop()
            if cur not in stubs:
                nodes.append(cur)
                if cur not in left and cur not in right:
                    leaves.append(cur)
            cur = right.get(cur)
        return nodes, leaves

    def mark_stub(self, v: int):
        """Stub v and delete its explored subtree."""
        self.stubs.add(v)
        stack = [c for c in (self.left.pop(v, None), self.right.pop(v, None))
                 if c is not None]
        while stack:
            w = stack.pop()
            for c in (self.left.pop(w, None), self.right.pop(w, None)):
                if c is not None:
                    stack.append(c)
            del self.kind[w]
            del self.parent[w]
            del self.depth[w]
            self.stubs.discard(w)


def trim(explored: ExploredTree, u: int, answer: str):
    """Prune the explored tree after an oracle answer at u.

    When the target is larger than u, every left child hanging off the
    root-to-u path that is not itself on the path becomes a stub; symmetric
    for a smaller target and right children. A queried node that is a true
    leaf is also stubbed, since its whole subtree is just itself and the
    answer excluded it. Returns the newly created stubs.
    """
    if answer == FOUND:
        raise TreeError("trim is undefined for a found answer")
    take = explored.left if answer == TARGET_LARGER else explored.right
    path = explored.path_to_root(u)
    on_path = set(path)
    stubs = explored.stubs
    new_stubs = []
    for v in path:
        c = take.get(v)
        if c is not None and c not in on_path and c not in stubs:
            explored.mark_stub(c)
            new_stubs.append(c)
    if explored.kind[u] == LEAF and u not in stubs:
        explored.mark_stub(u)
        new_stubs.append(u)
    return new_stubs


def median_node(explored: ExploredTree) -> int:
    """Non-stub node splitting the non-stub inorder as evenly as possible.

    The count difference is at most one whenever achievable; ties break
    toward the inorder-smaller candidate.
    """
    nodes = explored.inorder_nodes()
    if not nodes:
        raise TreeError("empty explored tree")
    return nodes[(len(nodes) - 1) // 2]


def median_leaf(explored: ExploredTree) -> int:
    """Median over non-stub explored leaves, same tie rule as median_node."""
    leaves = explored.inorder_nodes_and_leaves()[1]
    if not leaves:
        raise TreeError("no non-stub leaves to bisect")
    return leaves[(len(leaves) - 1) // 2]


def halve(explored: ExploredTree, oracle, mode: str = "nodes"):
    """Query the inorder median (of nodes or of leaves) and trim.

    Returns (answer, queried node, new stubs). Triggered at a node count of
    alpha*n the survivor count is at most 1 + (alpha/2 + 1)*n: the kept half
    plus the preserved query path.
    """
    u = median_node(explored) if mode == "nodes" else median_leaf(explored)
    answer = oracle.query(u)
    if answer == FOUND:
        return answer, u, []
    return answer, u, trim(explored, u, answer)


def dfs_extend(explored: ExploredTree, walker: Walker, depth_limit: int):
    """Grow the explored tree to the given depth by depth-first walking.

    Already explored edges are re-walked (each at most twice), stubs are
    never entered, the walk turns back at the depth limit, and the walker
    ends where it started: at the root. Returns (new ids, new fork count).
    """
    if walker.current != explored.root:
        raise TreeError("walker must start at the explored root")
    return _explore(explored, walker, depth_limit, explored.root)


def _explore(explored, walker, depth_limit, anchor):
    kinds = explored.kind
    stubs = explored.stubs
    lefts = explored.left
    rights = explored.right
    move = walker.move
    new_ids = []
    new_forks = 0
    # frame: [node, depth, next phase]
    stack = [[anchor, explored.depth[anchor], 0]]
    while stack:
        frame = stack[-1]
        node = frame[0]
        depth = frame[1]
        phase = frame[2]
        k = kinds[node]
        direction = None
        if depth < depth_limit and k != LEAF:
            if k == FORK:
                if phase == 0:
                    direction = DIR_LEFT
                    known = lefts.get(node)
                elif phase == 1:
                    direction = DIR_RIGHT
                    known = rights.get(node)
            elif phase == 0:
                direction = DIR_ONLY
                known = lefts.get(node)
                if known is None:
                    known = rights.get(node)
        if direction is None:
            stack.pop()
            if node != anchor:
                move(DIR_PARENT)
            continue
        frame[2] = phase + 1
        if known is not None and known in stubs:
            continue
        cid, ckind, cside = move(direction)
        if cid not in kinds:
            if ckind is None:
                ckind = walker.kind_of(cid)
            explored.add_child(node, cside, cid, ckind)
            new_ids.append(cid)
            if ckind == FORK:
                new_forks += 1
        stack.append([cid, depth + 1, 0])
    return new_ids, new_forks


@dataclass(frozen=True)
class SearchParams:
    """Knobs for the staged search.

    ``psi`` is roughly the oracle-call budget. Each round deepens the
    exploration limit by ``depth_step``; after exploring, the tree is
    decimated until it fits ``node_budget`` nodes and ``leaf_budget`` leaves.
    ``trigger_factor`` scales the decimation threshold against the depth
    bound.
    """

    psi: int
    leaf_budget: int
    depth_step: int
    node_budget: int
    trigger_factor: int = 4

    @classmethod
    def for_instance(cls, tree, psi=None) -> "SearchParams":
        t = tree.t
        if psi is None:
            psi = max(1, _ceil_sqrt(t))
        psi = max(1, min(psi, max(t, 1)))
        leaf_budget = max(1, _ceil_div(t, psi))
        depth_step = max(1, _ceil_div(2 * tree.n, psi))
        return cls(psi=psi, leaf_budget=leaf_budget, depth_step=depth_step,
                   node_budget=leaf_budget * depth_step)


@dataclass(frozen=True)
class RoundStats:
    index: int
    new_forks: int
    oracle_calls: int
    steps: int
    depth_limit: int


@dataclass(frozen=True)
class SearchResult:
    found: int
    steps: int
    oracle_calls: int
    rounds: tuple
    params: SearchParams | None = None


def final_binary_search(explored: ExploredTree, oracle) -> int:
    """Bisect the non-stub inorder sequence with the oracle until found.

    Uses at most ceil(log2(candidates)) + 1 calls.
    """
    seq = explored.inorder_nodes()
    lo = 0
    hi = len(seq) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        answer = oracle.query(seq[mid])
        if answer == FOUND:
            return seq[mid]
        if answer == TARGET_SMALLER:
            hi = mid - 1
        else:
            lo = mid + 1
    raise InconsistentOracleError("binary search exhausted its candidates")


def bifurcation_search(tree, oracle, params=None, walker=None,
                       trim_observer=None) -> SearchResult:
    """Staged search interleaving bounded-depth exploration with decimation.

    Round i explores to depth i * depth_step by DFS (skipping stubs), then
    repeatedly halves the explored tree until it fits the node and leaf
    budgets. Rounds stop once the limit covers the whole depth range, and a
    final bisection over the survivors pins down the target. A found answer
    anywhere aborts immediately.

    ``trim_observer``, when given, is called as observer(explored, new_stubs)
    after every trimming halve; it exists for soundness auditing.
    """
    if getattr(oracle, "mode", ANY_NODE) != ANY_NODE:
        raise OracleModeError("this search queries internal nodes")
    if params is None:
        params = SearchParams.for_instance(tree)
    if walker is None:
        walker = Walker(tree)
    explored = ExploredTree(tree.root, walker.kind_of(tree.root))
    # A bare root-to-depth path is incompressible, so the node target keeps
    # slack above the depth bound; decimation below that floor cannot help.
    node_cap = max(params.node_budget, params.trigger_factor * tree.n + 2)
    leaf_cap = params.leaf_budget
    base_steps = walker.steps
    base_calls = oracle.calls
    rounds = []
    i = 0
    while True:
        i += 1
        depth_limit = i * params.depth_step
        steps_before = walker.steps
        calls_before = oracle.calls
        _, new_forks = _explore(explored, walker, depth_limit, tree.root)
        found = None
        prev_sig = None
        while True:
            nodes, leaves = explored.inorder_nodes_and_leaves()
            sig = (len(nodes), len(leaves), len(explored.stubs))
            if sig == prev_sig:
                break  # decimation stalled at its structural floor
            prev_sig = sig
            if len(leaves) > leaf_cap:
                mode = "leaves"
            elif len(nodes) > node_cap:
                mode = "nodes"
            else:
                break
            answer, u, new_stubs = halve(explored, oracle, mode)
            if trim_observer is not None and new_stubs:
                trim_observer(explored, new_stubs)
            if answer == FOUND:
                found = u
                break
        rounds.append(RoundStats(i, new_forks, oracle.calls - calls_before,
                                 walker.steps - steps_before, depth_limit))
        if found is not None:
            return SearchResult(found, walker.steps - base_steps,
                                oracle.calls - base_calls, tuple(rounds),
                                params)
        if depth_limit >= tree.n:
            break
    target = final_binary_search(explored, oracle)
    return SearchResult(target, walker.steps - base_steps,
                        oracle.calls - base_calls, tuple(rounds), params)


def baseline_full(tree, oracle, walker=None) -> SearchResult:
    """Explore everything first, then bisect once.

    Steps come to exactly twice the edge count.
    """
    if walker is None:
        walker = Walker(tree)
    explored = ExploredTree(tree.root, walker.kind_of(tree.root))
    base_steps = walker.steps
    base_calls = oracle.calls
    _explore(explored, walker, tree.n, tree.root)
    target = final_binary_search(explored, oracle)
    return SearchResult(target, walker.steps - base_steps,
                        oracle.calls - base_calls, ())


def baseline_rounds(tree, oracle, walker=None) -> SearchResult:
    """Depth-capped rounds with a full bisection per round.

    Round i explores the subtree under the current frontier node down to
    absolute depth i * n / ceil(sqrt(t)), bisects the newly explored nodes to
    isolate the inorder gap holding the target, and descends to the frontier
    node guarding that gap for the next round.
    """
    if walker is None:
        walker = Walker(tree)
    explored = ExploredTree(tree.root, walker.kind_of(tree.root))
    base_steps = walker.steps
    base_calls = oracle.calls
    chunk = max(1, _ceil_div(tree.n, max(1, _ceil_sqrt(tree.t))))
    frontier = tree.root
    rounds = []
    i = 0
    while True:
        i += 1
        depth_limit = min(i * chunk, tree.n)
        steps_before = walker.steps
        calls_before = oracle.calls
        _, new_forks = _explore(explored, walker, depth_limit, frontier)
        cand = explored.inorder_below(frontier)
        lo = 0
        hi = len(cand) - 1
        found = None
        while lo <= hi:
            mid = (lo + hi) // 2
            answer = oracle.query(cand[mid])
            if answer == FOUND:
                found = cand[mid]
                break
            if answer == TARGET_SMALLER:
                hi = mid - 1
            else:
                lo = mid + 1
        rounds.append(RoundStats(i, new_forks, oracle.calls - calls_before,
                                 walker.steps - steps_before, depth_limit))
        if found is not None:
            return SearchResult(found, walker.steps - base_steps,
                                oracle.calls - base_calls, tuple(rounds))
        before = cand[hi] if hi >= 0 else None
        after = cand[lo] if lo < len(cand) else None
        nxt = _pick_frontier(explored, before, after)
        _descend(walker, explored, frontier, nxt)
        frontier = nxt
        if i > tree.n + 2:
            raise InconsistentOracleError("round limit exceeded")


def _pick_frontier(explored, before, after):
    """Choose which gap endpoint owns the unexplored region.

    Consecutive explored nodes are ancestor-related; the gap between them
    hangs under the descendant.
    """
    if before is None and after is None:
        raise InconsistentOracleError("no candidates remain")
    if before is None:
        return after
    if after is None:
        return before
    if _is_ancestor(explored, before, after):
        return after
    if _is_ancestor(explored, after, before):
        return before
    raise InconsistentOracleError("gap between unrelated explored nodes")


def _is_ancestor(explored, anc, v):
    depth = explored.depth
    parent = explored.parent
    d = depth[v] - depth[anc]
    if d < 0:
        return False
    while d > 0:
        v = parent[v]
        d -= 1
    return v == anc


def _descend(walker, explored, src, dst):
    """Walk the explored path from src down to its descendant dst."""
    chain = []
    parent = explored.parent
    v = dst
    while v != src:
        chain.append(v)
        v = parent[v]
        if v < 0:
            raise InconsistentOracleError("descent target is detached")
    kinds = explored.kind
    lefts = explored.left
    for node in reversed(chain):
        p = parent[node]
        if kinds[p] == FORK:
            direction = DIR_LEFT if lefts.get(p) == node else DIR_RIGHT
        else:
            direction = DIR_ONLY
        walker.move(direction)


ALGORITHMS = {
    "bifurcation": bifurcation_search,
    "full": baseline_full,
    "rounds": baseline_rounds,
}
