import math

import pytest

from chain_census.experiment import (
    fit_exponent,
    report_csv,
    run_experiment,
    verify_closed_form,
    verify_covering,
    verify_floor,
    verify_richness,
    write_scatter_svg,
)
from chain_census.constructions import gen_unit_rich_grid
from chain_census.geometry import exact_spec
from chain_census.layered import make_config, make_layer


class TestFitExponent:
    def test_exact_square_power(self):
        fit = fit_exponent([(n, n * n) for n in (4, 8, 16, 32)])
        assert abs(fit.slope - 2.0) <= 1e-9
        assert fit.r2 == pytest.approx(1.0)

    def test_constant_counts(self):
        fit = fit_exponent([(n, 7) for n in (4, 8, 16)])
        assert fit.slope == pytest.approx(0.0)

    def test_cubic_with_constant(self):
        fit = fit_exponent([(n, 2 * n**3) for n in (4, 8, 16, 32)])
        assert fit.slope == pytest.approx(3.0)
        assert fit.intercept == pytest.approx(math.log(2))

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            fit_exponent([(4, 16), (8, 64)])

    def test_zero_counts_excluded(self):
        fit = fit_exponent([(4, 16), (8, 64), (16, 256), (32, 0)])
        assert fit.excluded == 1
        assert fit.slope == pytest.approx(2.0)


class TestRunExperiment:
    def test_3d_even_sharp_slope(self):
        rep = run_experiment("3d-even", 4, [8, 16, 32], seed=1)
        assert rep.verdict == "PASS"
        assert abs(rep.fit.slope - 3.0) <= 0.05

    def test_single_n_skips_fit(self):
        rep = run_experiment("planar-chain", 2, [10], seed=1)
        assert rep.fit is None
        assert "fit skipped" in rep.notice
        assert rep.verdict == "SKIPPED"

    def test_csv_deterministic(self):
        a = report_csv(run_experiment("planar-chain", 2, [8, 16, 32], seed=4))
        b = report_csv(run_experiment("planar-chain", 2, [8, 16, 32], seed=4))
        assert a == b
        assert a.splitlines()[0] == "construction,k,n,chains,walks,incidences"

    def test_generator_failure_reported_per_row(self):
        rep = run_experiment("orthogonal", 1, [7, 8, 16, 32], seed=0)
        bad = [r for r in rep.rows if r.status != "ok"]
        assert len(bad) == 1 and bad[0].n == 7
        assert rep.fit is not None  # three good rows remain

    def test_planar_k1_slope_floor(self):
        rep = run_experiment("planar-k1", 4, [16, 32, 64, 128], seed=0)
        assert rep.fit.slope >= 2.0 - 0.2
        assert rep.verdict == "PASS"  # one-sided for floor-type constructions

    def test_svg_written(self, tmp_path):
        rep = run_experiment("planar-chain", 2, [8, 16, 32], seed=4)
        out = tmp_path / "plot.svg"
        write_scatter_svg(rep, out)
        text = out.read_text()
        assert text.startswith("<svg") and "circle" in text

    def test_residuals_near_zero_for_exact_powers(self):
        rep = run_experiment("3d-even", 2, [4, 8, 16], seed=0)
        assert all(abs(r) <= 1e-9 for r in rep.residuals())


class TestVerify:
    def test_closed_form_planar(self):
        res = verify_closed_form("planar-chain", 2, 50)
        assert res.passed and res.computed == 2500

    def test_closed_form_orthogonal(self):
        res = verify_closed_form("orthogonal", 3, 12)
        assert res.passed

    def test_closed_form_star(self):
        res = verify_closed_form("star", 3, 12)
        assert res.passed and res.computed == 64

    def test_floor_split(self):
        res = verify_floor("split", 0, 100, eps=1.0)
        assert res.passed

    def test_floor_planar_k1(self):
        res = verify_floor("planar-k1", 4, 16)
        assert res.passed

    def test_covering(self):
        cfg = make_config([[(0, 0), (1, 1)], [(1, 0), (0, 1)], [(0, 0), (1, 1)]], (1, 1))
        res = verify_covering(cfg, "1/2")
        assert res.passed

    def test_richness(self):
        grid = gen_unit_rich_grid(49)
        layer = make_layer(grid.points)
        res = verify_richness(layer, layer, grid.popular_d2, exact_spec(grid.popular_d2))
        assert res.passed
