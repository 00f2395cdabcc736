import math
import random

import pytest

from bifurcation.algorithms import (ALGORITHMS, ExploredTree, SearchParams,
                                    baseline_full, baseline_rounds,
                                    bifurcation_search, dfs_extend,
                                    final_binary_search, halve, median_node,
                                    trim)
from bifurcation.generators import (gen_complete_path, gen_random,
                                    place_target)
from bifurcation.model import (FOUND, LEAVES_ONLY, TARGET_LARGER,
                               TARGET_SMALLER, InstrumentedOracle,
                               OracleModeError, TreeError, Walker)

from helpers import (forks_within_depth, make_path, nodes_within_depth,
                     preorder_prefix, slow_inorder, target_inside_stub)


def explore_fully(tree, walker=None):
    walker = walker or Walker(tree)
    explored = ExploredTree(tree.root, walker.kind_of(tree.root))
    dfs_extend(explored, walker, tree.n)
    return explored, walker


def explored_from_prefix(tree, count):
    """Explored tree over the first `count` preorder ids, bypassing a walker."""
    ids = preorder_prefix(tree, count)
    explored = ExploredTree(tree.root, tree.kind(tree.root))
    for v in ids[1:]:
        p = tree.parent[v]
        explored.add_child(p, tree.child_side(v), v, tree.kind(v))
    return explored


# ---------------------------------------------------------------- trim


def test_trim_forkless_path_makes_no_stubs():
    tree = make_path("RRRR")
    explored, _ = explore_fully(tree)
    new = trim(explored, 2, TARGET_LARGER)
    # nothing hangs off the path going left, and node 2 is not a leaf
    assert new == []
    assert explored.stubs == set()


def test_trim_single_fork_at_root():
    tree = gen_complete_path(1, 1)
    explored, _ = explore_fully(tree)
    right = tree.right[tree.root]
    left = tree.left[tree.root]
    new = trim(explored, right, TARGET_LARGER)
    assert left in new
    assert left in explored.stubs


def test_trim_removes_stub_children_from_view():
    tree = gen_complete_path(2, 2)
    explored, _ = explore_fully(tree)
    before = explored.node_count
    new = trim(explored, tree.right[tree.root], TARGET_LARGER)
    assert explored.node_count < before
    for s in new:
        assert s in explored.kind  # the marker itself stays
        assert s not in explored.left and s not in explored.right


def test_trim_found_is_a_contract_violation():
    tree = make_path("L")
    explored, _ = explore_fully(tree)
    with pytest.raises(TreeError):
        trim(explored, 0, FOUND)


def test_trim_never_stubs_the_target_region():
    rng = random.Random(0)
    for i in range(500):
        tree = gen_random(6 + rng.randrange(40), rng.randrange(8), seed=i)
        tree.target = place_target(tree, "random_node", seed=i)
        explored, _ = explore_fully(tree)
        oracle = InstrumentedOracle(tree)
        u = rng.randrange(tree.size)
        answer = oracle.query(u)
        if answer == FOUND:
            continue
        trim(explored, u, answer)
        assert not target_inside_stub(tree, explored)


# ---------------------------------------------------------------- median


def test_median_single_node():
    tree = make_path("")
    explored = ExploredTree(tree.root, tree.kind(tree.root))
    assert median_node(explored) == tree.root


def test_median_all_left_path():
    tree = make_path("LLLLLL")  # 7 nodes, inorder is deepest first
    explored, _ = explore_fully(tree)
    order = slow_inorder(tree)
    u = median_node(explored)
    assert u == order[3]
    smaller = sum(1 for v in order[:order.index(u)])
    assert smaller == 3


def test_median_balance_random():
    rng = random.Random(1)
    for i in range(200):
        tree = gen_random(8 + rng.randrange(30), rng.randrange(10), seed=i)
        explored, _ = explore_fully(tree)
        u = median_node(explored)
        order = slow_inorder(tree)
        pos = order.index(u)
        assert abs(pos - (len(order) - 1 - pos)) <= 1


def test_median_tie_breaks_inorder_smaller():
    tree = make_path("RRRR")  # all-right path: inorder equals id order
    explored, _ = explore_fully(tree)
    order = slow_inorder(tree)
    # stub the inorder-last leaf to force an even candidate count
    explored.mark_stub(order[-1])
    remaining = [v for v in order if v not in explored.stubs]
    assert len(remaining) == 4
    # both middles split 1-vs-2; the inorder-smaller one wins the tie
    assert median_node(explored) == remaining[1]


# ---------------------------------------------------------------- halve


def test_halve_at_trigger_respects_size_bound():
    # trees grown to exactly alpha*n nodes land under 1 + (alpha/2 + 1) * n
    checked = 0
    seed = 0
    while checked < 60:
        seed += 1
        n = 8 + seed % 16
        tree = gen_random(n, n, seed=seed)
        if tree.size < 4 * n:
            continue
        tree.target = place_target(tree, "random_node", seed)
        explored = explored_from_prefix(tree, 4 * n)
        oracle = InstrumentedOracle(tree)
        answer, _, _ = halve(explored, oracle)
        if answer == FOUND:
            continue
        assert explored.node_count <= 1 + 3 * n
        checked += 1


def test_halve_m100_alpha4_n20_bound_61():
    seed = 0
    checked = 0
    while checked < 10:
        seed += 1
        tree = gen_random(20, 24, seed=seed)
        if tree.size < 100:
            continue
        tree.target = place_target(tree, "random_node", seed)
        explored = explored_from_prefix(tree, 100)
        assert explored.node_count == 100
        oracle = InstrumentedOracle(tree)
        answer, _, _ = halve(explored, oracle)
        if answer == FOUND:
            continue
        assert explored.node_count <= 61
        checked += 1


def test_halve_on_bare_path_is_vacuous():
    tree = make_path("RRRRR")
    tree.target = 0
    explored, _ = explore_fully(tree)
    oracle = InstrumentedOracle(tree)
    answer, u, _ = halve(explored, oracle)
    assert answer in (FOUND, TARGET_SMALLER, TARGET_LARGER)
    assert explored.node_count <= 1 + 3 * tree.n


def test_halve_leaf_mode_halves_leaves():
    tree = gen_complete_path(3, 2)
    tree.target = place_target(tree, "adversarial_deep")
    explored, _ = explore_fully(tree)
    oracle = InstrumentedOracle(tree)
    leaves_before = len(explored.inorder_nodes_and_leaves()[1])
    answer, u, _ = halve(explored, oracle, mode="leaves")
    assert tree.is_leaf(u)
    if answer != FOUND:
        leaves_after = len(explored.inorder_nodes_and_leaves()[1])
        assert leaves_after <= (leaves_before + 1) // 2 + 1


# ---------------------------------------------------------------- dfs_extend


def test_dfs_extend_full_depth_covers_instance():
    tree = gen_random(20, 5, seed=3)
    walker = Walker(tree)
    explored = ExploredTree(tree.root, walker.kind_of(tree.root))
    dfs_extend(explored, walker, tree.n)
    assert explored.node_count == tree.size
    assert walker.steps == 2 * (tree.size - 1)
    assert walker.current == tree.root


def test_dfs_extend_never_enters_stubs():
    tree = gen_complete_path(2, 3)
    walker = Walker(tree)
    explored = ExploredTree(tree.root, walker.kind_of(tree.root))
    dfs_extend(explored, walker, 3)  # just past the first fork
    root_fork = tree.root
    left = explored.left[root_fork]
    explored.mark_stub(left)
    steps_before = walker.steps
    dfs_extend(explored, walker, tree.n)
    # the stubbed side contributes no nodes and no walking
    for v in list(explored.kind):
        assert not _under(tree, v, left) or v == left
    assert walker.steps > steps_before


def _under(tree, v, top):
    while v >= 0:
        if v == top:
            return True
        v = tree.parent[v]
    return False


def test_dfs_extend_stage_counts_match_instance():
    tree = gen_complete_path(3, 4)
    walker = Walker(tree)
    explored = ExploredTree(tree.root, walker.kind_of(tree.root))
    prev_nodes = 1
    prev_forks = 1  # the root fork is revealed on arrival
    for i in (1, 2, 3):
        limit = 4 * i
        _, new_forks = dfs_extend(explored, walker, limit)
        want_nodes = nodes_within_depth(tree, limit)
        want_new_forks = forks_within_depth(tree, limit) - prev_forks
        assert explored.node_count == want_nodes
        assert new_forks == want_new_forks
        prev_forks += new_forks
        # every edge within the limit is walked down and up once per stage
        assert walker.steps == sum(
            2 * (nodes_within_depth(tree, 4 * j) - 1) for j in range(1, i + 1))
        prev_nodes = want_nodes
    assert prev_nodes == tree.size


# ------------------------------------------------------- final_binary_search


def test_final_search_single_candidate():
    tree = make_path("")
    tree.target = 0
    explored = ExploredTree(0, tree.kind(0))
    oracle = InstrumentedOracle(tree)
    assert final_binary_search(explored, oracle) == 0
    assert oracle.calls == 1


def test_final_search_call_bound_eight_path():
    tree = make_path("RRRRRRR")  # 8 nodes, inorder = id order
    tree.target = slow_inorder(tree)[4]
    explored, _ = explore_fully(tree)
    oracle = InstrumentedOracle(tree)
    assert final_binary_search(explored, oracle) == tree.target
    assert oracle.calls <= 4


def test_final_search_random_bound():
    rng = random.Random(5)
    for i in range(500):
        tree = gen_random(4 + rng.randrange(30), rng.randrange(6), seed=i)
        tree.target = place_target(tree, "random_node", seed=2 * i + 1)
        explored, _ = explore_fully(tree)
        oracle = InstrumentedOracle(tree)
        found = final_binary_search(explored, oracle)
        assert found == tree.target
        assert oracle.calls <= math.ceil(math.log2(tree.size)) + 1


# ------------------------------------------------------- bifurcation_search


def test_bifurcation_on_path_uses_log_calls():
    tree = gen_random(128, 0, seed=1)
    tree.target = place_target(tree, "random_node", 9)
    oracle = InstrumentedOracle(tree)
    params = SearchParams.for_instance(tree, psi=1)
    result = bifurcation_search(tree, oracle, params=params)
    assert result.found == tree.target
    assert result.oracle_calls <= 2 * math.log2(tree.n)


def test_bifurcation_target_at_root():
    tree = gen_random(40, 6, seed=2)
    tree.target = tree.root
    oracle = InstrumentedOracle(tree)
    result = bifurcation_search(tree, oracle)
    assert result.found == tree.root


def test_bifurcation_rejects_leaf_mode_oracle():
    tree = gen_random(16, 2, seed=3)
    oracle = InstrumentedOracle(tree, mode=LEAVES_ONLY)
    with pytest.raises(OracleModeError):
        bifurcation_search(tree, oracle)


def test_bifurcation_round_budgets_hold():
    rng = random.Random(6)
    for i in range(40):
        n = 32 + rng.randrange(200)
        t = 3 + rng.randrange(24)
        tree = gen_random(n, t, seed=i)
        tree.target = place_target(tree, "random_node", seed=i)
        oracle = InstrumentedOracle(tree)
        params = SearchParams.for_instance(tree)
        result = bifurcation_search(tree, oracle, params=params)
        assert result.found == tree.target
        node_cap = max(params.node_budget, params.trigger_factor * tree.n + 2)
        # drive the round machinery in slow motion and check the budgets
        walker = Walker(tree)
        explored = ExploredTree(tree.root, walker.kind_of(tree.root))
        oracle2 = InstrumentedOracle(tree)
        found_early = False
        for rs in result.rounds:
            dfs_extend(explored, walker, rs.depth_limit)
            for _ in range(200):
                nodes, leaves = explored.inorder_nodes_and_leaves()
                if len(leaves) > params.leaf_budget:
                    mode = "leaves"
                elif len(nodes) > node_cap:
                    mode = "nodes"
                else:
                    break
                answer, _, _ = halve(explored, oracle2, mode)
                if answer == FOUND:
                    found_early = True
                    break
            if found_early:
                break
            nodes, leaves = explored.inorder_nodes_and_leaves()
            assert len(nodes) <= node_cap
            assert len(leaves) <= params.leaf_budget


def test_bifurcation_extreme_psi_still_terminates():
    tree = gen_random(50, 9, seed=13)
    tree.target = place_target(tree, "adversarial_deep")
    for psi in (1, 2, 9, 50):
        oracle = InstrumentedOracle(tree)
        params = SearchParams.for_instance(tree, psi=psi)
        result = bifurcation_search(tree, oracle, params=params)
        assert result.found == tree.target
        assert params.psi <= max(tree.t, 1)


def test_bifurcation_round_stats_accounting():
    tree = gen_random(200, 12, seed=7)
    tree.target = place_target(tree, "adversarial_deep")
    oracle = InstrumentedOracle(tree)
    result = bifurcation_search(tree, oracle)
    assert sum(r.new_forks for r in result.rounds) <= tree.t
    assert sum(r.steps for r in result.rounds) == result.steps
    assert result.rounds[-1].depth_limit >= tree.n
    for i, rs in enumerate(result.rounds, 1):
        assert rs.index == i
        assert rs.depth_limit == i * result.params.depth_step


# ------------------------------------------------------------- baselines


def test_full_path_steps():
    tree = gen_random(7, 0, seed=0)
    tree.target = place_target(tree, "random_node", 1)
    oracle = InstrumentedOracle(tree)
    result = baseline_full(tree, oracle)
    assert result.steps == 14
    assert result.found == tree.target


def test_full_complete_path_step_count():
    tree = gen_complete_path(3, 4)
    tree.target = place_target(tree, "random_node", 4)
    oracle = InstrumentedOracle(tree)
    result = baseline_full(tree, oracle)
    assert result.steps == 2 * (tree.size - 1)
    assert result.oracle_calls <= math.ceil(math.log2(tree.size)) + 1


def test_rounds_single_fork_two_rounds():
    tree = gen_random(32, 1, seed=9)
    tree.target = place_target(tree, "adversarial_deep")
    oracle = InstrumentedOracle(tree)
    result = baseline_rounds(tree, oracle)
    assert result.found == tree.target
    assert len(result.rounds) <= 2


def test_all_algorithms_find_random_targets():
    rng = random.Random(11)
    for i in range(120):
        n = 4 + rng.randrange(120)
        t = rng.randrange(16)
        strategy = ("random_node", "random_leaf", "adversarial_deep",
                    "fixed:0")[i % 4]
        tree = gen_random(n, t, seed=i)
        tree.target = place_target(tree, strategy, seed=i)
        for name, fn in ALGORITHMS.items():
            oracle = InstrumentedOracle(tree)
            result = fn(tree, oracle)
            assert result.found == tree.target, (name, n, t, strategy, i)
