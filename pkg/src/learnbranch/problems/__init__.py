from .baselines import ClosestCity, closest_city, make_baseline, min_value, random_value
from .coloring import (GraphColoringInstance, brute_force_chromatic, build_gc_model,
                       generate_gc, read_dimacs, write_dimacs)
from .families import PROBLEMS, ColoringProblem, TSPTWProblem, get_problem
from .tsptw import (DIST_SCALE, TSPTWInstance, brute_force_tsptw, build_tsptw_model,
                    generate_tsptw, read_tsptw, write_tsptw)


def brute_force_optimal(instance):
    """Exact optimum by enumeration (coloring or TSPTW, n <= 8)."""
    if isinstance(instance, GraphColoringInstance):
        return brute_force_chromatic(instance)
    if isinstance(instance, TSPTWInstance):
        return brute_force_tsptw(instance)
    raise TypeError(f"no brute force for {type(instance).__name__}")
