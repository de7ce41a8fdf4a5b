import math
import random
from fractions import Fraction

import pytest

from chain_census.geometry import (
    NoRationalPointError,
    exact_point,
    exact_spec,
    float_point,
    squared_distance,
)
from chain_census.layered import (
    certify_config,
    count_chains,
    count_incidences,
    count_tree_embeddings,
    enumerate_chains,
    make_config,
    make_layer,
)
from chain_census.constructions import (
    gen_3d_even,
    gen_3d_odd_regular,
    gen_3d_odd_sphere,
    gen_orthogonal_circles,
    gen_planar_chain,
    gen_planar_k1mod3,
    gen_star,
    gen_star_of_paths,
    gen_unit_rich_grid,
    peel_min_degree,
    split_and_translate,
    stereographic_to_plane,
    stereographic_to_sphere,
)

F = Fraction


def max_sq_diam(points):
    pts = list(points)
    worst = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            worst = max(worst, squared_distance(pts[i], pts[j]))
    return worst


class TestPlanarChain:
    def test_k0_single_point(self):
        cfg = gen_planar_chain(0, [], 1)
        assert count_chains(cfg) == 1

    def test_k2_exact_square(self):
        cfg = gen_planar_chain(2, None, 5, 0.25)
        assert cfg.spec.exact
        assert count_chains(cfg) == 25

    def test_k5_floor(self):
        cfg = gen_planar_chain(5, None, 8, 0.25)
        assert count_chains(cfg) >= 8**3

    def test_k3_floor_and_last_layer_diameter(self):
        eps = 0.125
        cfg = gen_planar_chain(3, None, 6, eps)
        assert count_chains(cfg) >= 6**2
        assert float(max_sq_diam(cfg.layers[-1].points)) <= eps * eps

    def test_base_last_layer_diameter_exact(self):
        eps = 0.25
        cfg = gen_planar_chain(2, None, 7, eps)
        assert max_sq_diam(cfg.layers[-1].points) <= F(eps) ** 2

    def test_tolerant_configs_certify(self):
        cfg = gen_planar_chain(6, None, 5, 0.25)
        certify_config(cfg)  # must not raise
        cfg.validate()

    def test_invalid_delta_rejected(self):
        with pytest.raises(ValueError):
            gen_planar_chain(2, [1, 0], 5)

    def test_exact_mode_impossible_for_steps(self):
        with pytest.raises(NoRationalPointError):
            gen_planar_chain(3, None, 4, mode="exact")

    def test_determinism(self):
        a = gen_planar_chain(5, None, 6, 0.25, seed=9)
        b = gen_planar_chain(5, None, 6, 0.25, seed=9)
        assert [tuple(p.coords for p in la.points) for la in a.layers] == [
            tuple(p.coords for p in lb.points) for lb in b.layers
        ]


class TestUnitRichGrid:
    def test_two_by_two(self):
        grid = gen_unit_rich_grid(4)
        assert grid.popular_d2 == 1
        assert grid.pair_count == 4

    def test_matches_brute_histogram(self):
        grid = gen_unit_rich_grid(9)
        hist = {}
        pts = grid.points
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = squared_distance(pts[i], pts[j])
                hist[d] = hist.get(d, 0) + 1
        best = max(hist.items(), key=lambda kv: (kv[1], -kv[0]))
        assert grid.popular_d2 == best[0]
        assert grid.pair_count == best[1]

    def test_neighbor_floor(self):
        for m in (4, 10, 30):
            grid = gen_unit_rich_grid(m)
            assert grid.pair_count >= m - 1

    def test_too_small(self):
        with pytest.raises(ValueError):
            gen_unit_rich_grid(3)


class TestSplitAndTranslate:
    def test_two_points(self):
        res = split_and_translate([exact_point((0, 0), 0)], [exact_point((1, 0), 0)], 1, 0.5)
        assert res.preserved_incidences == 1
        assert len(res.x2) == 1
        assert max_sq_diam(res.x2) == 0

    def test_grid_pair_floor(self):
        grid = gen_unit_rich_grid(100)
        res = split_and_translate(grid.points, grid.points, 1, 1.0, seed=0)
        assert res.floor == F(res.original_incidences, 968)
        assert res.preserved_incidences >= res.floor
        assert max_sq_diam(res.x2) <= 1

    def test_half_edges_survive_cutting(self):
        grid = gen_unit_rich_grid(64)
        res = split_and_translate(grid.points, grid.points, 1, 1.0, seed=3)
        assert 2 * res.uncut_edges >= res.original_incidences

    def test_no_edges_rejected(self):
        with pytest.raises(ValueError):
            split_and_translate([exact_point((0, 0), 0)], [exact_point((5, 0), 0)], 1, 0.5)

    def test_determinism(self):
        grid = gen_unit_rich_grid(49)
        a = split_and_translate(grid.points, grid.points, grid.popular_d2, 1.0, seed=5)
        b = split_and_translate(grid.points, grid.points, grid.popular_d2, 1.0, seed=5)
        assert a.offset == b.offset
        assert [p.coords for p in a.x2] == [p.coords for p in b.x2]

    def test_distance_preserved_inside_squares(self):
        grid = gen_unit_rich_grid(36)
        res = split_and_translate(grid.points, grid.points, 1, 2.0, seed=1)
        spec = exact_spec(1)
        assert (
            count_incidences(make_layer(res.x1), make_layer(res.x2), F(1), spec)
            == res.preserved_incidences
        )

    def test_no_point_dropped_for_lying_on_a_line(self):
        # offsets placing a vertex on a grid line are rejected, so the first
        # side always survives in full
        grid = gen_unit_rich_grid(81)
        res = split_and_translate(grid.points, grid.points, 1, 1.0, seed=2)
        assert len(res.x1) == len(grid.points)
        assert len({p.coords for p in res.x1}) == len(grid.points)


class TestPlanarK1:
    def test_k1_is_the_pair(self):
        res = gen_planar_k1mod3(1, 16, eps=1.0)
        assert res.config.k == 1
        assert count_chains(res.config) == res.preserved_incidences

    def test_k4_floor(self):
        res = gen_planar_k1mod3(4, 16, seed=0)
        assert count_chains(res.config) >= 16 * res.preserved_incidences

    def test_wrong_congruence(self):
        with pytest.raises(ValueError):
            gen_planar_k1mod3(2, 16)


class Test3dEven:
    def test_k2_n7(self):
        cfg = gen_3d_even(2, [1.0, 1.0], 7)
        assert count_chains(cfg) == 49

    def test_k4_n5(self):
        cfg = gen_3d_even(4, [1.0] * 4, 5)
        assert count_chains(cfg) == 125

    def test_k2_n1(self):
        cfg = gen_3d_even(2, [1.0, 1.0], 1)
        assert count_chains(cfg) == 1

    def test_unequal_distances(self):
        cfg = gen_3d_even(4, [1.0, 4.0, 0.25, 2.25], 3)
        assert count_chains(cfg) == 27

    def test_layers_disjoint_and_certified(self):
        cfg = gen_3d_even(6, [1.0] * 6, 4)
        seen = set()
        for layer in cfg.layers:
            cs = layer.coord_set()
            assert not (cs & seen)
            seen |= cs
        certify_config(cfg)

    def test_odd_k_rejected(self):
        with pytest.raises(ValueError):
            gen_3d_even(3, [1.0] * 3, 4)


class TestPeeling:
    def test_triangle_kept(self):
        from chain_census.geometry import DistanceSpec

        pts = make_layer([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)])
        res = peel_min_degree(pts, 1.0, DistanceSpec((1.0,), 1e-9))
        assert len(res.layer.points) == 3
        assert res.min_degree == 2

    def test_star_keeps_everything(self):
        # K_{1,5} at unit distance: four lattice neighbors plus one rational
        layer = make_layer(
            [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (F(3, 5), F(4, 5))]
        )
        res = peel_min_degree(layer, F(1), exact_spec(1))
        assert res.initial_edges == 5
        assert res.threshold == F(5, 12)
        assert len(res.layer.points) == 6
        assert res.min_degree >= 1

    def test_grid_min_degree_guarantee(self):
        grid = gen_unit_rich_grid(400)
        layer = make_layer(grid.points)
        res = peel_min_degree(layer, grid.popular_d2, exact_spec(grid.popular_d2))
        assert len(res.layer.points) >= 1
        assert 2 * res.vertex_count * res.min_degree >= res.initial_edges

    def test_no_edges(self):
        with pytest.raises(ValueError):
            peel_min_degree(make_layer([(0, 0), (5, 5)]), F(1), exact_spec(1))


class Test3dOddRegular:
    def test_small_grid_brute_force(self):
        res = gen_3d_odd_regular(3, 8)
        got = count_chains(res.config)
        assert got == len(enumerate_chains(res.config))
        assert got >= res.floor

    def test_n125_floor(self):
        res = gen_3d_odd_regular(3, 125)
        got = count_chains(res.config)
        assert got >= len(res.core.points) * max(res.min_degree - 3, 0) ** 3

    def test_layers_identical(self):
        res = gen_3d_odd_regular(3, 27)
        first = res.config.layers[0].coord_set()
        assert all(layer.coord_set() == first for layer in res.config.layers)


class Test3dOddSphere:
    def test_default_supplier_floor(self):
        res = gen_3d_odd_sphere(3, 16)
        assert res.sphere_incidences >= 16
        assert count_chains(res.config) >= res.floor

    def test_sphere_membership(self):
        res = gen_3d_odd_sphere(3, 9)
        center = res.config.layers[1].points[0]
        for p in res.config.layers[2].points:
            assert abs(float(squared_distance(p, center)) - 1.0) <= 1e-9

    def test_off_sphere_supplier_rejected(self):
        def bad(n, center):
            return [float_point((9.0, 9.0, 9.0))], [float_point((10.0, 9.0, 9.0))]

        with pytest.raises(ValueError):
            gen_3d_odd_sphere(3, 9, supplier=bad)

    def test_zero_incidence_supplier(self):
        def lonely(n, center):
            cx, cy, cz = (float(c) for c in center.coords)
            xs = [float_point((cx + 1.0, cy, cz))]
            ys = [float_point((cx + 50.0, cy, cz))]
            return xs, ys

        res = gen_3d_odd_sphere(3, 4, supplier=lonely)
        assert res.sphere_incidences == 0
        assert res.floor == 0
        assert count_chains(res.config) == 0


class TestOrthogonalCircles:
    def test_k1_n20(self):
        res = gen_orthogonal_circles(4, 1, 20)
        assert res.closed_form == 200
        assert count_chains(res.config) == 200

    def test_k3_n20(self):
        res = gen_orthogonal_circles(4, 3, 20)
        assert res.closed_form == 16200
        assert count_chains(res.config) == 16200

    def test_cross_pairs_exact(self):
        res = gen_orthogonal_circles(4, 1, 12)
        pts = res.config.layers[0].points
        for p in pts[:6]:
            for q in pts[6:]:
                assert squared_distance(p, q) == 1

    def test_small_brute_force(self):
        res = gen_orthogonal_circles(4, 2, 8)
        assert count_chains(res.config) == len(enumerate_chains(res.config)) == res.closed_form

    def test_higher_dimension_padding(self):
        res = gen_orthogonal_circles(6, 1, 8)
        assert res.config.dim == 6
        assert count_chains(res.config) == res.closed_form

    def test_odd_n_rejected(self):
        with pytest.raises(ValueError):
            gen_orthogonal_circles(4, 1, 7)


class TestStar:
    def test_single_edge(self):
        res = gen_star(1, 10)
        assert count_tree_embeddings(res.layers, res.tree, res.spec) == 10

    def test_three_circles(self):
        res = gen_star(3, 30)
        got = count_tree_embeddings(res.layers, res.tree, res.spec)
        assert got == 1000 == res.closed_form

    def test_three_circles_brute_force(self):
        from itertools import product

        from chain_census.geometry import matches_distance

        res = gen_star(3, 12)
        brute = 0
        for tup in product(*(layer.points for layer in res.layers)):
            if len({p.coords for p in tup}) != len(tup):
                continue
            if all(matches_distance(tup[a], tup[b], d2, res.spec) for a, b, d2 in res.tree.edges):
                brute += 1
        assert brute == count_tree_embeddings(res.layers, res.tree, res.spec) == 64

    def test_center_not_on_circles(self):
        res = gen_star(2, 8)
        center = res.layers[0].points[0]
        for layer in res.layers[1:]:
            assert center.coords not in layer.coord_set()

    def test_repeated_radii_rejected(self):
        with pytest.raises(ValueError):
            gen_star(2, 8, radii2=[1, 1])

    def test_indivisible_rejected(self):
        with pytest.raises(ValueError):
            gen_star(3, 10)


class TestStarOfPaths:
    def test_tree_shape(self):
        res = gen_star_of_paths(3, 4)
        assert res.tree.vertex_count == 10
        degree = sum(1 for a, b, _ in res.tree.edges if 0 in (a, b))
        assert degree == 3

    def test_l1_matches_path_config(self):
        res = gen_star_of_paths(1, 5)
        # same layers counted as a 4-layer path configuration
        cfg = make_config([layer.points for layer in res.layers], (1.0, 1.0, 1.0), eps=1e-9)
        assert res.count == count_chains(cfg)

    def test_joints_fixed_floor(self):
        res = gen_star_of_paths(3, 8)
        assert res.count >= 8**4
        assert res.floor == 8**4

    def test_center_fixed_floor(self):
        res = gen_star_of_paths(2, 8, variant="center-fixed", grid_m=16)
        assert res.count >= res.floor
        assert res.floor >= 1

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            gen_star_of_paths(1, 4, variant="sideways")


class TestStereographic:
    def test_origin_to_south_pole(self):
        out = stereographic_to_sphere([exact_point((0, 0))])
        assert out[0].coords == (0, 0, -1)

    def test_round_trip_floats(self):
        rng = random.Random(97)
        pts = [float_point((rng.uniform(-5, 5), rng.uniform(-5, 5))) for _ in range(50)]
        back = stereographic_to_plane(stereographic_to_sphere(pts))
        for p, q in zip(pts, back):
            for a, b in zip(p.coords, q.coords):
                assert abs(a - b) <= 1e-12

    def test_images_on_sphere(self):
        rng = random.Random(101)
        pts = [float_point((rng.uniform(-5, 5), rng.uniform(-5, 5))) for _ in range(50)]
        for q in stereographic_to_sphere(pts):
            assert abs(sum(c * c for c in q.coords) - 1.0) <= 1e-12

    def test_exact_round_trip(self):
        pts = [exact_point((F(1, 2), F(1, 3))), exact_point((3, 4))]
        back = stereographic_to_plane(stereographic_to_sphere(pts))
        assert [p.coords for p in back] == [p.coords for p in pts]

    def test_pole_rejected(self):
        with pytest.raises(ValueError):
            stereographic_to_plane([exact_point((0, 0, 1))])
