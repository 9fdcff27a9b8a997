import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from learnbranch.problems import (DIST_SCALE, ClosestCity, GraphColoringInstance, TSPTWInstance,
                                  brute_force_optimal, build_gc_model, build_tsptw_model,
                                  closest_city, generate_gc, generate_tsptw, get_problem,
                                  min_value, random_value, read_dimacs, read_tsptw, write_dimacs,
                                  write_tsptw)
from learnbranch.problems.coloring import is_proper
from learnbranch.problems.families import problem_for_path
from learnbranch.search import RandomValue, Status, dfs_solve, select_variable_in_order


def complete(n):
    return GraphColoringInstance(n, list(itertools.combinations(range(1, n + 1), 2)))


# coloring

def test_instance_validation():
    with pytest.raises(ValueError):
        GraphColoringInstance(3, [(1, 1)])
    with pytest.raises(ValueError):
        GraphColoringInstance(3, [(1, 2), (2, 1)])
    with pytest.raises(ValueError):
        GraphColoringInstance(3, [(1, 4)])


def test_k3_model_shape():
    m = build_gc_model(complete(3))
    assert len(m.variables) == 4 and len(m.constraints) == 6
    assert [x.size for x in m.x] == [3, 3, 3] and m.k.size == 4
    assert m.objective is m.k


def test_generator_bipartite_full_density():
    inst = generate_gc(4, 1.0, 2, seed=3)
    assert inst.n_edge == 4
    assert is_proper(inst, [g - 1 for g in inst.planted])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 14), st.floats(0.05, 1.0), st.integers(2, 5), st.integers(0, 10**6))
def test_planted_coloring_is_proper(n, p, k, seed):
    k = min(k, n)
    inst = generate_gc(n, p, k, seed)
    assert is_proper(inst, [g - 1 for g in inst.planted])
    sizes = np.bincount(inst.planted)[1:]
    assert sizes.max() - sizes.min() <= 1


def test_generator_is_deterministic_and_validates():
    assert generate_gc(10, 0.5, 4, 7) == generate_gc(10, 0.5, 4, 7)
    with pytest.raises(ValueError):
        generate_gc(3, 0.5, 4, 0)
    with pytest.raises(ValueError):
        generate_gc(5, 0.0, 2, 0)


def test_n20_generated_instance_has_at_most_k_colors():
    inst = generate_gc(20, 0.5, 4, seed=11)
    r = dfs_solve(build_gc_model(inst), node_limit=200000)
    assert r.status is Status.OPTIMAL and r.best_objective <= 4


@pytest.mark.parametrize("inst, chi", [
    (complete(4), 4),
    (GraphColoringInstance(3, [(1, 2), (2, 3)]), 2),
    (GraphColoringInstance(3, []), 1),
    (complete(3), 3),
])
def test_brute_force_chromatic(inst, chi):
    assert brute_force_optimal(inst) == chi


def test_brute_force_cap():
    with pytest.raises(ValueError):
        brute_force_optimal(GraphColoringInstance(9, []))
    with pytest.raises(TypeError):
        brute_force_optimal("K4")


def test_dimacs_round_trip(tmp_path):
    inst = generate_gc(9, 0.6, 3, seed=5)
    path = tmp_path / "g.col"
    write_dimacs(inst, path)
    assert read_dimacs(path) == inst
    text = path.read_text().splitlines()
    assert text[0] == f"p edge 9 {inst.n_edge}"


def test_dimacs_errors_name_the_line(tmp_path):
    path = tmp_path / "bad.col"
    path.write_text("p edge 3 1\ne 1\n")
    with pytest.raises(ValueError, match=":2:"):
        read_dimacs(path)


# tsptw

def test_two_city_route_cost_is_single_leg():
    inst = TSPTWInstance([(0, 0), (3, 4)], [(0, 10000), (0, 10000)])
    r = dfs_solve(build_tsptw_model(inst), select_variable_in_order)
    assert r.best_objective == 5 * DIST_SCALE == inst.dist[0, 1]


def test_wait_for_window_opening():
    # travel 5 (scaled 500) into a window [1000, 1200]: wait until 1000
    inst = TSPTWInstance([(0, 0), (5, 0)], [(0, 2000), (1000, 1200)])
    assert inst.route_cost([0, 1]) == 500
    r = dfs_solve(build_tsptw_model(inst), select_variable_in_order)
    assert r.status is Status.OPTIMAL
    late = TSPTWInstance([(0, 0), (5, 0)], [(0, 2000), (100, 400)])
    assert dfs_solve(build_tsptw_model(late), select_variable_in_order).status is Status.INFEASIBLE


def test_waiting_shifts_later_arrivals():
    # waiting at city 1 until 1000 makes city 2 (closing at 1200) unreachable
    inst = TSPTWInstance([(0, 0), (1, 0), (4, 0)], [(0, 5000), (1000, 1100), (0, 1200)])
    assert inst.route_cost([0, 1, 2]) is None
    assert inst.route_cost([0, 2, 1]) == 400 + 300
    assert brute_force_optimal(inst) == 700


def test_instance_invariants():
    inst = generate_tsptw(7, seed=4, max_tw_width=500)
    assert np.array_equal(inst.dist, inst.dist.T) and (inst.dist >= 0).all()
    assert inst.windows[0][0] == 0
    assert all(a <= b for a, b in inst.windows)
    with pytest.raises(ValueError):
        TSPTWInstance([(0, 0), (1, 1)], [(0, 10), (5, 4)])
    with pytest.raises(ValueError):
        TSPTWInstance([(0, 0)], [(3, 10)])


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 9), st.integers(0, 10**6), st.sampled_from([10, 100, 500]))
def test_reference_tour_is_feasible(n, seed, width):
    inst = generate_tsptw(n, seed=seed, max_tw_width=width)
    assert sorted(inst.reference_tour) == list(range(n))
    assert inst.route_cost(inst.reference_tour) is not None


def test_generator_same_seed_same_instance():
    assert generate_tsptw(6, seed=9) == generate_tsptw(6, seed=9)
    assert generate_tsptw(6, seed=9) != generate_tsptw(6, seed=10)


def test_n5_optimum_matches_permutations():
    inst = generate_tsptw(5, seed=21, max_tw_width=500)
    r = dfs_solve(build_tsptw_model(inst), select_variable_in_order)
    assert r.best_objective == brute_force_optimal(inst)


def test_n6_generated_never_infeasible():
    problem = get_problem("tsptw", n=6)
    for seed in range(100):
        inst = problem.generate(seed)
        r = dfs_solve(problem.build_model(inst), select_variable_in_order,
                      RandomValue(seed))
        assert r.status is Status.OPTIMAL, seed


def test_tsptw_round_trip(tmp_path):
    inst = generate_tsptw(6, seed=2)
    path = tmp_path / "a.tsptw"
    write_tsptw(inst, path)
    back = read_tsptw(path)
    assert back == inst and np.array_equal(back.dist, inst.dist)


def test_tsptw_read_errors(tmp_path):
    path = tmp_path / "bad.tsptw"
    path.write_text("2\n0 0 0 10\n1 1 0\n")
    with pytest.raises(ValueError, match=":3:"):
        read_tsptw(path)


# baselines

def test_min_value_and_random_value():
    m = build_gc_model(GraphColoringInstance(3, []))
    x = m.x[0]
    x.remove(2)
    assert min_value(m, x) == 1
    rng = np.random.default_rng(0)
    m2 = build_gc_model(GraphColoringInstance(2, []))
    seen = {random_value(m2, m2.x[0], rng) for _ in range(100)}
    assert seen == {1, 2}


def test_closest_city_picks_nearest_then_lowest_id():
    inst = TSPTWInstance([(0, 0), (5, 0), (1, 0), (0, 1)], [(0, 10**5)] * 4)
    m = build_tsptw_model(inst)
    m.fix_point()
    v1 = m.stages[1]
    assert closest_city(m, v1) == 2
    assert ClosestCity().select(m, v1, None) == 2


def test_closest_city_worked_example():
    inst = TSPTWInstance([(0, 0), (1, 0), (5, 0)], [(0, 10**5)] * 3)
    m = build_tsptw_model(inst)
    m.fix_point()
    assert closest_city(m, m.stages[1]) == 1


# families

def test_problem_registry():
    assert get_problem("coloring").n_actions == 11
    assert get_problem("tsptw", n=5).n_actions == 5
    with pytest.raises(ValueError):
        get_problem("knapsack")
    with pytest.raises(ValueError):
        get_problem("coloring").baseline("closest_city")
    assert problem_for_path("x/y.tsptw").name == "tsptw"
    with pytest.raises(ValueError):
        problem_for_path("x.txt")
