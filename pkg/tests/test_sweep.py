import json
import math

import pytest

from squeezed_bsm.circuit import CircuitParams, build_detection_table
from squeezed_bsm.discrimination import classify, usd_success
from squeezed_bsm.sweep import (
    SINGULAR_R,
    ScanReport,
    SweepSpec,
    SweepSpecError,
    default_pe_budgets,
    envelope,
    envelope_to_csv,
    nonuniform_scan,
    points_from_csv,
    points_from_json_obj,
    points_to_csv,
    points_to_json_obj,
    psd_sweep,
    usd_sweep,
)

SMALL = dict(r_start=0.1, r_stop=0.3, r_step=0.1, include_singular=False)


class TestSweepSpec:
    def test_grid_values(self):
        spec = SweepSpec(r_start=0.0, r_stop=0.02, r_step=0.01,
                         include_singular=False)
        assert spec.r_values() == (0.0, 0.01, 0.02)

    def test_singular_point_injected(self):
        spec = SweepSpec(r_start=0.0, r_stop=0.9, r_step=0.1)
        assert SINGULAR_R in spec.r_values()

    def test_singular_point_suppressed(self):
        spec = SweepSpec(r_start=0.0, r_stop=0.9, r_step=0.1,
                         include_singular=False)
        assert SINGULAR_R not in spec.r_values()

    def test_singular_point_outside_window(self):
        spec = SweepSpec(r_start=0.0, r_stop=0.3, r_step=0.1)
        assert SINGULAR_R not in spec.r_values()

    @pytest.mark.parametrize("kwargs", [
        dict(r_step=0.0),
        dict(r_step=-0.1),
        dict(r_start=0.5, r_stop=0.4),
        dict(r_stop=0.95),
        dict(n_max_values=()),
        dict(eta_values=()),
        dict(eta_values=(1.5,)),
        dict(pe_max_values=()),
        dict(pe_max_values=(-0.1,)),
        dict(n_max_values=(-3,)),
    ])
    def test_invalid_specs_rejected(self, kwargs):
        with pytest.raises(SweepSpecError):
            SweepSpec(**kwargs)

    def test_default_budgets(self):
        budgets = default_pe_budgets()
        assert budgets[0] == pytest.approx(1e-4)
        assert budgets[-2] == pytest.approx(1e-1)
        assert math.isinf(budgets[-1])
        assert len(budgets) == 122


class TestUsdSweep:
    def test_unsqueezed_point_is_half(self):
        spec = SweepSpec(r_start=0.0, r_stop=0.0, r_step=0.01,
                         n_max_values=(2,), include_singular=False)
        (point,) = usd_sweep(spec)
        assert point.p_s == pytest.approx(0.5, abs=1e-9)
        assert point.p_e == 0.0
        assert point.alpha == 1.0
        assert point.n_selected == 0

    def test_matches_direct_evaluation(self):
        spec = SweepSpec(n_max_values=(5,), **SMALL)
        points = usd_sweep(spec)
        for point in points:
            classes = classify(build_detection_table(
                CircuitParams.uniform(point.r, n_max=5)))
            assert point.p_s == usd_success(classes)

    def test_sorted_output(self):
        spec = SweepSpec(n_max_values=(3, 2), **SMALL)
        points = usd_sweep(spec)
        keys = [(p.r, (1, 0) if p.n_max is None else (0, p.n_max)) for p in points]
        assert keys == sorted(keys)


class TestPsdSweep:
    def test_zero_budget_slice_equals_usd(self):
        spec = SweepSpec(n_max_values=(4,), pe_max_values=(0.0, 1e-3), **SMALL)
        points = psd_sweep(spec)
        usd_points = usd_sweep(SweepSpec(n_max_values=(4,), **SMALL))
        zero_slice = [p for p in points if p.pe_max == 0.0]
        assert len(zero_slice) == len(usd_points)
        for a, b in zip(zero_slice, usd_points):
            assert a.p_s == pytest.approx(b.p_s, abs=1e-12)

    def test_workers_give_identical_results(self):
        spec = SweepSpec(n_max_values=(3,), pe_max_values=(1e-3,), **SMALL)
        assert psd_sweep(spec, workers=1) == psd_sweep(spec, workers=2)

    def test_progress_output(self, capsys):
        spec = SweepSpec(n_max_values=(2,), pe_max_values=(0.0,), **SMALL)
        psd_sweep(spec, progress=True)
        assert "sweep:" in capsys.readouterr().err


class TestEnvelope:
    def test_single_point_single_bin(self):
        spec = SweepSpec(r_start=0.2, r_stop=0.2, r_step=0.1,
                         n_max_values=(4,), pe_max_values=(1e-3,),
                         include_singular=False)
        points = psd_sweep(spec)
        env = envelope(points)
        assert len(env) == 1
        assert env[0].p_s == points[0].p_s
        assert env[0].r == 0.2

    def test_dominates_binned_points(self):
        spec = SweepSpec(n_max_values=(4,), pe_max_values=(1e-3, 1e-2, math.inf),
                         **SMALL)
        points = psd_sweep(spec)
        env = envelope(points, bin_width=0.01)
        for e in env:
            members = [p for p in points if p.alpha is not None
                       and abs(p.alpha - e.alpha) <= 0.005 + 1e-12]
            assert all(p.p_s <= e.p_s + 1e-15 for p in members)

    def test_empty_input_rejected(self):
        with pytest.raises(SweepSpecError):
            envelope([])

    def test_bad_bin_width_rejected(self):
        spec = SweepSpec(r_start=0.2, r_stop=0.2, r_step=0.1,
                         n_max_values=(2,), pe_max_values=(0.0,),
                         include_singular=False)
        with pytest.raises(SweepSpecError):
            envelope(psd_sweep(spec), bin_width=0.0)


class TestNonuniformScan:
    def test_diagonal_matches_uniform_sweep(self):
        report = nonuniform_scan(values=(0.0, 0.3), n_max=5)
        assert len(report.entries) == 16
        uniform = {e.rs[0]: e.p_s for e in report.entries if e.is_uniform}
        for r, expected in uniform.items():
            classes = classify(build_detection_table(
                CircuitParams.uniform(r, n_max=5)))
            assert usd_success(classes) == pytest.approx(expected, abs=1e-15)

    def test_rail_swap_invariance(self):
        report = nonuniform_scan(values=(0.1, 0.4), n_max=6)
        by_tuple = {e.rs: e.p_s for e in report.entries}
        for (r1, r2, r3, r4), ps in by_tuple.items():
            assert by_tuple[(r2, r1, r4, r3)] == pytest.approx(ps, abs=1e-12)

    def test_oversized_grid_rejected(self):
        with pytest.raises(SweepSpecError):
            nonuniform_scan(values=tuple(i / 20 for i in range(11)))

    def test_report_serialization(self):
        report = nonuniform_scan(values=(0.0, 0.45), n_max=4)
        obj = report.to_json_obj()
        assert obj["n_points"] == 16
        assert isinstance(obj["nonuniform_outperforms"], bool)
        csv_text = report.to_csv()
        assert csv_text.splitlines()[0] == "r1,r2,r3,r4,p_s"
        assert len(csv_text.splitlines()) == 17


class TestEmission:
    def _points(self):
        spec = SweepSpec(n_max_values=(4, None), pe_max_values=(0.0, 1e-3, math.inf),
                         **SMALL)
        return psd_sweep(spec)

    def test_csv_round_trip_identity(self):
        points = self._points()
        assert points_from_csv(points_to_csv(points)) == points

    def test_json_round_trip_identity(self):
        points = self._points()
        text = json.dumps(points_to_json_obj(points))
        assert points_from_json_obj(json.loads(text)) == points

    def test_byte_determinism(self):
        spec = SweepSpec(n_max_values=(3,), pe_max_values=(1e-3,), **SMALL)
        assert points_to_csv(psd_sweep(spec)) == points_to_csv(psd_sweep(spec))

    def test_empty_point_list_gives_header_only(self):
        assert points_to_csv([]).splitlines() == [
            "r,n_max,eta,pe_max,p_s,p_e,alpha,erasure,n_selected,deficit"]

    def test_unknown_header_rejected(self):
        with pytest.raises(SweepSpecError):
            points_from_csv("bogus,header\n1,2\n")

    def test_envelope_csv_header(self):
        env = envelope(self._points())
        assert envelope_to_csv(env).splitlines()[0] == "alpha,p_s,r,pe_max"
