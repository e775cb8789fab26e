import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uptail.aps import ApModel, IntegerSet, conditional_expectation_ap, full_set
from uptail.graphs import (
    Graph,
    SubgraphModel,
    complete_graph,
    conditional_expectation_subgraph,
    path_graph,
)
from uptail.models import (
    InducedSubgraphModel,
    conditional_mean_given_subcube,
    ground_size,
    model_mean,
)
from uptail.variational import (
    BudgetExceededError,
    InfeasibleConstructionError,
    build_construction,
    clique_hub_crossover,
    independence_polynomial,
    min_conditioning_witness,
    min_planting_cost,
    min_subcube_witness,
    mixture_cost,
    mixture_cost_grid,
    mixture_cost_infinite,
    poisson_rate,
    tail_log_upper_bound,
    theta_root,
)


class TestMixtureCost:
    def test_pure_clique_point(self):
        assert mixture_cost(3, 1.0, 1.5, 0.0) == 0.5

    def test_pure_hub_point(self):
        assert math.isclose(mixture_cost(3, 1.0, 1.5, 1.0), math.sqrt(0.5) / 1.5)

    def test_integer_excess_collapses_fraction(self):
        # x dc/r integral: second term is linear, x d/r exactly
        value = mixture_cost(3, 2.0, 3.0, 0.5)
        assert math.isclose(value, (2 * 0.5) ** (2 / 3) / 2 + 0.5 * 2 / 3)

    def test_rejects_limits(self):
        with pytest.raises(ValueError):
            mixture_cost(3, 1.0, 0.0, 0.5)
        with pytest.raises(ValueError):
            mixture_cost(3, 1.0, math.inf, 0.5)

    @given(st.integers(3, 5), st.floats(0.01, 5), st.floats(0.01, 10),
           st.floats(0, 1))
    @settings(max_examples=300, deadline=None)
    def test_formula_is_lower_envelope(self, r, delta, c, x):
        best = min_planting_cost(r, delta, c)
        assert best.phi <= mixture_cost(r, delta, c, x) + 1e-9

    def test_grid_matches_scalar(self):
        xs = np.linspace(0, 1, 101)
        grid = mixture_cost_grid(3, 1.3, 2.7, xs)
        for x, g in zip(xs, grid):
            assert math.isclose(g, mixture_cost(3, 1.3, 2.7, float(x)), abs_tol=1e-12)


class TestMinPlantingCost:
    def test_infinite_c(self):
        result = min_planting_cost(3, 1.0, math.inf)
        assert math.isclose(result.phi, 1 / 3) and result.argmins == (1.0,)

    def test_integral_point(self):
        result = min_planting_cost(3, 1.0, 3.0)
        assert math.isclose(result.phi, 1 / 3)
        assert result.argmins == (1.0,)

    def test_balanced_delta(self):
        result = min_planting_cost(3, 3.375, math.inf)
        assert math.isclose(result.phi, 1.125)
        assert result.argmins == (0.0, 1.0)

    def test_zero_c(self):
        result = min_planting_cost(4, 2.0, 0)
        assert math.isclose(result.phi, 2 ** 0.5 / 2) and result.argmins == (0.0,)

    def test_limit_continuity(self):
        for r in (3, 4, 5):
            for delta in np.linspace(0.1, 5, 25):
                low = min_planting_cost(r, float(delta), 1e-6).phi
                assert abs(low - delta ** (2 / r) / 2) <= 1e-3
                high = min_planting_cost(r, float(delta), 1e6).phi
                expected = min(delta ** (2 / r) / 2, delta / r)
                assert abs(high - expected) <= 1e-3

    def test_grid_agreement_sampled(self):
        # closed form vs dense-grid minimum (grid augmented with the three
        # candidate points, which the uniform grid cannot hit exactly)
        xs = np.linspace(0.0, 1.0, 20001)
        rng = random.Random(3)
        for _ in range(60):
            r = rng.choice([3, 4, 5])
            delta = rng.uniform(0.05, 5)
            c = rng.uniform(0.1, 10)
            result = min_planting_cost(r, delta, c)
            points = np.concatenate([xs, [0.0, 1.0, result.mix_point]])
            grid_min = float(mixture_cost_grid(r, delta, c, points).min())
            assert abs(result.phi - grid_min) <= 1e-9

    def test_crossover(self):
        assert abs(clique_hub_crossover(3) - 3.375) <= 1e-9
        for r in (4, 5):
            root = clique_hub_crossover(r)
            assert abs(root ** (2 / r) / 2 - root / r) <= 1e-9


class TestPoissonRate:
    def test_zero(self):
        assert poisson_rate(0, 5.0) == 0

    def test_unit(self):
        assert math.isclose(poisson_rate(1, 1), 2 * math.log(2) - 1)

    def test_e_minus_one(self):
        assert math.isclose(poisson_rate(math.e - 1, 1), 1.0)


class TestIndependencePolynomial:
    def test_clique(self):
        assert independence_polynomial(complete_graph(4)) == [1, 4, 0, 0, 0]

    def test_path(self):
        # P3: independent sets: {}, 3 singletons, {ends}
        assert independence_polynomial(path_graph(3)) == [1, 3, 1, 0]

    def test_theta_clique_closed_form(self):
        for r in (3, 4, 5):
            for delta in (0.5, 1.0, 2.0):
                assert abs(theta_root(complete_graph(r), delta) - delta / r) <= 1e-9


class TestConstructions:
    def test_clique_size(self):
        model = SubgraphModel(complete_graph(3), 100, Fraction(3, 10))
        witness = build_construction("clique", model, 0.728)
        used = {v for e in witness.payload.edges for v in e}
        assert len(used) == 36 and witness.payload.num_edges == 36 * 35 // 2
        assert witness.feasible

    def test_clique_infeasible(self):
        model = SubgraphModel(complete_graph(3), 5, Fraction(9, 10))
        with pytest.raises(InfeasibleConstructionError):
            build_construction("clique", model, 50.0)

    def test_interval(self):
        model = ApModel(100, 3, Fraction(1, 10))
        witness = build_construction("interval", model, 1.0)
        assert witness.payload.elements() == [1, 2, 3, 4, 5]
        assert witness.feasible

    def test_interval_scan_is_minimal(self):
        model = ApModel(100, 3, Fraction(1, 10))
        witness = build_construction("interval", model, 1.0)
        target = Fraction(1) * model.p ** 3 * 2450 / (1 - model.p ** 3)
        size = len(witness.payload)
        from uptail.aps import extremal_ap_count
        assert extremal_ap_count(size, 3) >= target > extremal_ap_count(size - 1, 3)

    def test_hub_pure_star_branch(self):
        model = SubgraphModel(complete_graph(3), 20, Fraction(1, 10))
        witness = build_construction("hub", model, 1.0)
        # excess level below one: no complete-bipartite core, only the star
        degrees = witness.payload.degrees()
        assert max(degrees) == witness.payload.num_edges  # a single star
        level = 1.0 * 20 * 0.1 ** 2 / 3
        assert witness.payload.num_edges == math.floor(level ** 0.5 * 19)

    def test_hub_with_core(self):
        model = SubgraphModel(complete_graph(3), 60, Fraction(1, 2))
        witness = build_construction("hub", model, 3.0)
        # level = 3*60*0.25/3 = 15 exactly: complete bipartite 15 x 44
        assert witness.payload.num_edges == 15 * 44
        # feasibility is decided exactly; at this scale the finite-size loss
        # keeps the planted mean just below the (1+delta) target
        lhs = conditional_expectation_subgraph(model, witness.payload)
        assert witness.conditional_mean == lhs
        assert witness.feasible == (lhs >= 4 * model_mean(model))

    def test_feasible_flag_is_exact(self):
        rng = random.Random(5)
        for _ in range(20):
            n = rng.randint(4, 5)
            p = Fraction(rng.randint(1, 3), 4)
            model = SubgraphModel(complete_graph(3), n, p)
            delta = rng.uniform(0.2, 2.0)
            try:
                witness = build_construction(rng.choice(["clique", "hub"]), model, delta)
            except InfeasibleConstructionError:
                continue
            lhs = conditional_expectation_subgraph(model, witness.payload)
            assert witness.conditional_mean == lhs
            assert witness.feasible == (lhs >= (1 + Fraction(delta)) * model_mean(model))


class TestBruteForce:
    def test_triangles_two_edges(self):
        model = SubgraphModel(complete_graph(3), 4, Fraction(1, 2))
        witness = min_conditioning_witness(model, 0.9)
        assert witness.payload.num_edges == 2
        assert math.isclose(witness.log_cost, 2 * math.log(2))
        # one edge is not enough
        for e in complete_graph(4).edges:
            single = conditional_expectation_subgraph(model, Graph(4, frozenset({e})))
            assert single < Fraction(19, 10) * Fraction(1, 2)

    def test_delta_zero_empty(self):
        model = SubgraphModel(complete_graph(3), 4, Fraction(1, 2))
        witness = min_conditioning_witness(model, 0.0)
        assert witness.payload.num_edges == 0 and witness.log_cost == 0

    def test_ap_example(self):
        model = ApModel(5, 3, Fraction(1, 2))
        witness = min_conditioning_witness(model, 3.0)
        assert witness.payload.elements() == [1, 2, 3]
        assert math.isclose(witness.log_cost, 3 * math.log(2))
        assert conditional_expectation_ap(model, witness.payload) == Fraction(9, 4)

    def test_infeasible_is_infinite(self):
        model = ApModel(5, 3, Fraction(1, 2))
        witness = min_conditioning_witness(model, 100.0)
        assert witness.log_cost == math.inf and not witness.feasible

    def test_budget_error(self):
        model = ApModel(14, 3, Fraction(1, 100))
        with pytest.raises(BudgetExceededError):
            min_conditioning_witness(model, 1e9, budget=100)

    def test_minimality_against_exhaustive(self):
        rng = random.Random(9)
        for _ in range(10):
            model = ApModel(rng.randint(4, 7), 3, Fraction(1, 2))
            delta = rng.uniform(0.3, 4)
            witness = min_conditioning_witness(model, delta)
            threshold = (1 + Fraction(delta)) * model_mean(model)
            best = None
            for mask in range(1 << model.N):
                if conditional_expectation_ap(model, IntegerSet(mask)) >= threshold:
                    size = bin(mask).count("1")
                    if best is None or size < best:
                        best = size
            if best is None:
                assert witness.log_cost == math.inf
            else:
                assert len(witness.payload) == best


class TestSubcube:
    def test_monotone_matches_subset_solver(self):
        model = SubgraphModel(complete_graph(3), 4, Fraction(1, 2))
        for delta in (0.3, 0.9, 2.0):
            cube = min_subcube_witness(model, delta)
            flat = min_conditioning_witness(model, delta)
            assert math.isclose(cube.log_cost, flat.log_cost)
            ones, zeros = cube.payload
            assert zeros.mask == 0

    def test_subcube_dominates_subset(self):
        rng = random.Random(21)
        for _ in range(6):
            model = ApModel(rng.randint(4, 6), 3, Fraction(1, 3))
            delta = rng.uniform(0.3, 3)
            cube = min_subcube_witness(model, delta)
            flat = min_conditioning_witness(model, delta)
            assert cube.log_cost <= flat.log_cost + 1e-12

    def test_induced_path_mixed_witness(self):
        model = InducedSubgraphModel(path_graph(3), 4, Fraction(2, 3))
        witness = min_subcube_witness(model, 0.1)
        ones, zeros = witness.payload
        assert len(ones) == 1 and len(zeros) == 1
        assert witness.conditional_mean == 2
        # independent recheck of optimality: scan all subcubes directly
        n = ground_size(model)
        threshold = (1 + Fraction(1, 10)) * model_mean(model)
        best = math.inf
        for support in range(1 << n):
            sub = support
            while True:
                ones_m, zeros_m = sub, support & ~sub
                cost = bin(ones_m).count("1") * math.log(3) + \
                    bin(zeros_m).count("1") * math.log(3 / 2)
                if cost < best and conditional_mean_given_subcube(
                        model, ones_m, zeros_m) >= threshold:
                    best = cost
                if sub == 0:
                    break
                sub = (sub - 1) & support
        assert math.isclose(witness.log_cost, best)

    def test_infeasible(self):
        model = InducedSubgraphModel(path_graph(3), 4, Fraction(1, 2))
        witness = min_subcube_witness(model, 100.0)
        assert witness.log_cost == math.inf


class TestTailUpperBound:
    def test_triangle_instance(self):
        model = SubgraphModel(complete_graph(3), 4, Fraction(1, 2))
        phi = min_conditioning_witness(model, 1.0 + 0.9).log_cost
        bound = tail_log_upper_bound(model, 1.0, 0.9, phi)
        exact = -math.log(23 / 64)
        assert bound >= exact

    def test_infeasible_passthrough(self):
        model = SubgraphModel(complete_graph(3), 4, Fraction(1, 2))
        assert tail_log_upper_bound(model, 1.0, 0.9, math.inf) == math.inf

    def test_degenerate_warning(self):
        model = SubgraphModel(complete_graph(3), 4, Fraction(1, 2))
        with pytest.warns(RuntimeWarning):
            tail_log_upper_bound(model, 1.0, 50.0, 1.0)
