"""Shared test oracles, implemented independently of the package internals."""

import sys
from array import array

from bifurcation.model import TreeInstance


def make_path(sides):
    """A bare path instance; sides[k] in "LR" labels the edge into node k+1."""
    parent = array("i", [-1])
    left = array("i", [-1])
    right = array("i", [-1])
    depth = array("i", [0])
    for k, s in enumerate(sides):
        v = k + 1
        parent.append(k)
        left.append(-1)
        right.append(-1)
        depth.append(v)
        if s == "L":
            left[k] = v
        else:
            right[k] = v
    return TreeInstance(parent, left, right, depth, n=len(sides), t=0)


def slow_inorder(tree):
    """Reference inorder sequence by direct recursion."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * tree.size + 100))
    out = []

    def visit(v):
        l = tree.left[v]
        r = tree.right[v]
        if l >= 0:
            visit(l)
        out.append(v)
        if r >= 0:
            visit(r)

    visit(tree.root)
    return out


def root_path_edges(label, h):
    """Edges on the root path of a leaf label, as (depth, prefix) pairs."""
    return frozenset((d, label >> (h - d)) for d in range(1, h + 1))


def edge_union(labels, h):
    out = set()
    for q in labels:
        out |= root_path_edges(q, h)
    return out


def target_inside_stub(tree, explored):
    """True when some stub is an ancestor-or-self of the instance target."""
    v = tree.target
    stubs = explored.stubs
    while v >= 0:
        if v in stubs:
            return True
        v = tree.parent[v]
    return False


def nodes_within_depth(tree, limit):
    return sum(1 for v in range(tree.size) if tree.depth[v] <= limit)


def forks_within_depth(tree, limit):
    return sum(1 for v in range(tree.size)
               if tree.depth[v] <= limit
               and tree.left[v] >= 0 and tree.right[v] >= 0)


def preorder_prefix(tree, count):
    """First `count` ids of a left-first preorder walk; downward closed."""
    out = []
    stack = [tree.root]
    while stack and len(out) < count:
        v = stack.pop()
        out.append(v)
        r = tree.right[v]
        l = tree.left[v]
        if r >= 0:
            stack.append(r)
        if l >= 0:
            stack.append(l)
    return out


def brute_minimax(h):
    """Leaf-game value by exhaustive enumeration over every query sequence,
    including wasteful out-of-range and endpoint queries. Prices come from
    explicit root-path edge sets, not from the package's rank arithmetic."""
    size = 1 << h
    edges = [root_path_edges(q, h) for q in range(size)]
    memo = {}

    def solve(queried, x, y):
        if x == y:
            return 0
        key = (queried, x, y)
        if key in memo:
            return memo[key]
        used = set()
        mask = queried
        i = 0
        while mask:
            if mask & 1:
                used |= edges[i]
            mask >>= 1
            i += 1
        best = None
        for q in range(size):
            bit = 1 << q
            if queried & bit:
                continue
            price = len(edges[q] - used)
            if q < x or q > y:
                sub = solve(queried | bit, x, y)
            else:
                a = q - x
                b = y - q
                if a > b:
                    sub = solve(queried | bit, x, q - 1)
                else:
                    sub = solve(queried | bit, q + 1, y)
            total = price + sub
            if best is None or total < best:
                best = total
        memo[key] = best
        return best

    return solve(0, 0, size - 1)
