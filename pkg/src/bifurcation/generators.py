"""Instance suppliers: random trees with an exact fork count, combs, and the
complete-tree-with-stretched-edges family, plus target placement."""

from __future__ import annotations

import math
import random
from array import array
from dataclasses import dataclass

from .model import LEFT, RIGHT, InfeasibleInstanceError, TreeInstance

FAMILIES = ("random", "path", "comb", "complete_path")

MASK64 = 0xFFFFFFFFFFFFFFFF


def mix_seed(seed: int, salt: int) -> int:
    """Counter-style derivation of independent 64-bit sub-seeds."""
    x = (seed + (salt + 1) * 0x9E3779B97F4A7C15) & MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


@dataclass(frozen=True)
class FamilySpec:
    """Parameters for one generated instance."""

    family: str
    n: int
    t: int
    seed: int = 0
    target_strategy: str = "random_node"


class _Builder:
    def __init__(self):
        self.parent = array("i")
        self.left = array("i")
        self.right = array("i")
        self.depth = array("i")

    def new_node(self, parent, side):
        v = len(self.parent)
        self.parent.append(-1 if parent is None else parent)
        self.left.append(-1)
        self.right.append(-1)
        if parent is None:
            self.depth.append(0)
        else:
            self.depth.append(self.depth[parent] + 1)
            if side == LEFT:
                self.left[parent] = v
            else:
                self.right[parent] = v
        return v

    def finish(self, n, t, family):
        return TreeInstance(self.parent, self.left, self.right, self.depth,
                            n=n, t=t, family=family)


def gen_random(n: int, t: int, seed: int = 0) -> TreeInstance:
    """Random instance: a depth-n spine plus t fork branches.

    Forks are attached to unary nodes picked at random; each new branch is a
    path whose length is exponential with mean about 2n/sqrt(t), truncated to
    the depth budget, so richer fork counts carry proportionally more
    exploration mass. Exactly t forks, deterministic per seed.
    """
    if n < 1:
        raise InfeasibleInstanceError("need n >= 1")
    if t < 0:
        raise InfeasibleInstanceError("need t >= 0")
    rng = random.Random(mix_seed(seed, 17))
    b = _Builder()
    b.new_node(None, None)
    cur = 0
    for _ in range(n):
        cur = b.new_node(cur, LEFT if rng.random() < 0.5 else RIGHT)
    hosts = list(range(n))  # spine minus its tip: unary, depth <= n - 1
    lam = max(2.0, 2.0 * n / max(1.0, math.sqrt(t))) if t else 1.0
    placed = 0
    while placed < t:
        if not hosts:
            raise InfeasibleInstanceError(
                "cannot place %d forks within depth %d" % (t, n))
        # a length-1 branch consumes a host without replacing it; grow the
        # pool from the shallowest host when it would otherwise starve
        need_growth = (t - placed) > len(hosts)
        if need_growth:
            idx = min(range(len(hosts)),
                      key=lambda i: (b.depth[hosts[i]], hosts[i]))
            host = hosts[idx]
            room = n - b.depth[host]
            if room < 2:
                raise InfeasibleInstanceError(
                    "cannot place %d forks within depth %d" % (t, n))
            length = room
        else:
            idx = rng.randrange(len(hosts))
            host = hosts[idx]
            room = n - b.depth[host]
            length = 1 + min(int(rng.expovariate(1.0 / lam)), room - 1)
        hosts[idx] = hosts[-1]
        hosts.pop()
        free = RIGHT if b.left[host] >= 0 else LEFT
        cur = host
        for k in range(length):
            side = free if k == 0 else (LEFT if rng.random() < 0.5 else RIGHT)
            cur = b.new_node(cur, side)
            if k < length - 1:
                hosts.append(cur)
        placed += 1
    return b.finish(n, t, "random")


def gen_complete_path(h: int, delta: int) -> TreeInstance:
    """Complete binary tree of height h with every edge stretched into a path
    of delta edges: depth bound h*delta, 2**h - 1 forks, 2**h leaves."""
    if h < 1 or delta < 1:
        raise InfeasibleInstanceError("need h >= 1 and delta >= 1")
    if h > 20:
        raise InfeasibleInstanceError("2**%d leaves is past desk scale" % h)
    total = (2 ** (h + 1) - 1) + (2 ** (h + 1) - 2) * (delta - 1)
    if total > 8_000_000:
        raise InfeasibleInstanceError("instance would have %d nodes" % total)
    b = _Builder()
    root = b.new_node(None, None)
    stack = [(root, 0)]
    while stack:
        node, level = stack.pop()
        if level == h:
            continue
        for side in (LEFT, RIGHT):
            cur = node
            for _ in range(delta):
                cur = b.new_node(cur, side)
            stack.append((cur, level + 1))
    return b.finish(h * delta, 2 ** h - 1, "complete_path")


def gen_comb(n: int, t: int, seed: int = 0) -> TreeInstance:
    """Spine of length n with t evenly spaced forks, each sprouting a path
    that reaches depth n."""
    if n < 1 or t < 0:
        raise InfeasibleInstanceError("need n >= 1 and t >= 0")
    spacing = n // (t + 1) if t else n
    if t and spacing < 1:
        raise InfeasibleInstanceError(
            "no room for %d forks on a spine of length %d" % (t, n))
    rng = random.Random(mix_seed(seed, 23))
    b = _Builder()
    b.new_node(None, None)
    spine = [0]
    cur = 0
    for _ in range(n):
        cur = b.new_node(cur, LEFT if rng.random() < 0.5 else RIGHT)
        spine.append(cur)
    for j in range(t):
        host = spine[(j + 1) * spacing]
        free = RIGHT if b.left[host] >= 0 else LEFT
        cur = host
        for k in range(n - b.depth[host]):
            side = free if k == 0 else (LEFT if rng.random() < 0.5 else RIGHT)
            cur = b.new_node(cur, side)
    return b.finish(n, t, "comb")


def place_target(tree: TreeInstance, strategy: str, seed: int = 0) -> int:
    """Pick the search target.

    Strategies: ``random_node``, ``random_leaf``, ``adversarial_deep`` (the
    inorder-last deepest leaf, maximizing exploration before discovery), and
    ``fixed:K`` for the K-th node in inorder.
    """
    if strategy.startswith("fixed:"):
        k = int(strategy.split(":", 1)[1])
        order = tree.inorder_sequence()
        if not 0 <= k < len(order):
            raise InfeasibleInstanceError("fixed target %d out of range" % k)
        return order[k]
    rng = random.Random(mix_seed(seed, 31))
    if strategy == "random_node":
        return rng.randrange(tree.size)
    if strategy == "random_leaf":
        leaves = [v for v in range(tree.size) if tree.is_leaf(v)]
        return rng.choice(leaves)
    if strategy == "adversarial_deep":
        ranks = tree.inorder_ranks()
        best = tree.root
        best_key = (-1, -1)
        for v in range(tree.size):
            if tree.is_leaf(v):
                key = (tree.depth[v], ranks[v])
                if key > best_key:
                    best_key = key
                    best = v
        return best
    raise ValueError("unknown target strategy %r" % (strategy,))


def build_instance(spec: FamilySpec) -> TreeInstance:
    """Generate the family instance and assign its target."""
    fam = spec.family
    if fam == "random":
        tree = gen_random(spec.n, spec.t, mix_seed(spec.seed, 1))
    elif fam == "path":
        tree = gen_random(spec.n, 0, mix_seed(spec.seed, 1))
    elif fam == "comb":
        tree = gen_comb(spec.n, spec.t, mix_seed(spec.seed, 1))
    elif fam == "complete_path":
        h = math.isqrt(spec.t)
        if h < 1 or h * h != spec.t:
            raise InfeasibleInstanceError(
                "complete_path needs a square fork parameter, got %d" % spec.t)
        delta = max(1, spec.n // h)
        tree = gen_complete_path(h, delta)
    else:
        raise ValueError("unknown family %r" % (fam,))
    tree.target = place_target(tree, spec.target_strategy, mix_seed(spec.seed, 2))
    return tree


def validate_instance(tree: TreeInstance) -> None:
    """Check structural invariants, raising InfeasibleInstanceError on failure."""
    size = tree.size
    roots = [v for v in range(size) if tree.parent[v] < 0]
    if roots != [tree.root]:
        raise InfeasibleInstanceError("expected a single root")
    forks = 0
    for v in range(size):
        l = tree.left[v]
        r = tree.right[v]
        if l >= 0 and r >= 0:
            forks += 1
            if l == r:
                raise InfeasibleInstanceError("duplicate child at %d" % v)
        for c in (l, r):
            if c >= 0:
                if tree.parent[c] != v:
                    raise InfeasibleInstanceError("parent link mismatch at %d" % c)
                if tree.depth[c] != tree.depth[v] + 1:
                    raise InfeasibleInstanceError("depth mismatch at %d" % c)
        if l < 0 and r < 0 and tree.depth[v] > tree.n:
            raise InfeasibleInstanceError(
                "leaf %d at depth %d exceeds bound %d" % (v, tree.depth[v], tree.n))
    if forks != tree.t:
        raise InfeasibleInstanceError(
            "fork count %d does not match declared %d" % (forks, tree.t))
    if not 0 <= tree.target < size:
        raise InfeasibleInstanceError("target out of range")
