"""
Tests for trace files, q_gamma tables and SVG renderings.
"""

import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fov_relay.scenarios import scenario_dancing, scenario_single_worst_case
from fov_relay.simulator import run
from relay_app.services.export_service import (
    qgamma_to_text,
    render_svg,
    snapshot_indices,
    trace_header,
    trace_to_text,
    write_qgamma_table,
    write_trace_csv,
)


@pytest.fixture(scope="module")
def short_trace():
    return run(scenario_dancing(n=3, crossings=2, dt=0.01, t_final=2.0))


def _rows(text):
    return [line for line in text.splitlines()[1:] if not line.startswith("#")]


class TestTraceFile:
    """Comma-separated trace with a '#' summary footer."""

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_header_width(self, n):
        header = trace_header(n)
        assert len(header) == 9 + 4 * n
        assert header[:3] == ["t", "p_r_x", "p_r_y"]
        assert header[-6:] == ["u_r_x", "u_r_y", "chi_n", "d_r", "eta", "a_r"]

    def test_rows_match_header(self, short_trace):
        text = trace_to_text(short_trace)
        header = text.splitlines()[0].split(",")
        rows = _rows(text)
        assert len(header) == 9 + 4 * 3
        assert len(rows) == len(short_trace.t) == 201
        assert all(len(r.split(",")) == len(header) for r in rows)

    def test_fifteen_significant_digits(self, short_trace):
        rows = _rows(trace_to_text(short_trace))
        values = np.array([[float(v) for v in r.split(",")] for r in rows])
        assert np.allclose(values[:, 0], short_trace.t, rtol=1e-14, atol=0.0)
        assert np.allclose(values[:, 1:3], short_trace.p_r, rtol=1e-14, atol=1e-300)
        assert np.allclose(values[:, 3:5], short_trace.agents[:, 0], rtol=1e-14, atol=1e-300)

    def test_text_is_reproducible(self, short_trace):
        again = run(short_trace.scenario)
        assert trace_to_text(again) == trace_to_text(short_trace)

    def test_footer_reports_violation(self, tmp_path):
        trace = run(scenario_single_worst_case(K_r_multiplier=0.9, t_final=1.0))
        path = write_trace_csv(trace, str(tmp_path / "out" / "trace.csv"))
        footer = [line for line in path.read_text().splitlines() if line.startswith("#")]
        assert any(line.startswith("# event fov_violation") for line in footer)
        assert any(line.startswith("# fov_violations: ") and not line.endswith(": 0") for line in footer)


class TestQGammaTable:
    def test_half_plane_endpoints(self):
        lines = qgamma_to_text(math.pi / 2, 11).splitlines()
        assert lines[0] == "phi_rad,q_gamma"
        first = [float(v) for v in lines[1].split(",")]
        last = [float(v) for v in lines[11].split(",")]
        assert first[1] == pytest.approx(2.0)
        assert last[1] == pytest.approx(1.0)
        assert lines[-1].startswith("# minimum: phi_star=")

    def test_minimum_of_table(self, tmp_path):
        path = write_qgamma_table(math.pi / 4, 1000, str(tmp_path / "q.csv"))
        data = np.loadtxt(path, delimiter=",", skiprows=1, comments="#")
        assert data.shape == (1000, 2)
        assert data[:, 1].min() == pytest.approx(0.5607, abs=1e-4)


class TestSvg:
    """Trajectory rendering with FoV snapshots."""

    def test_snapshot_instants(self, short_trace):
        idx = snapshot_indices(short_trace)
        assert idx == [0, 40, 80, 120, 160, 200]

    def test_six_wedge_groups(self, short_trace, tmp_path):
        path = render_svg(short_trace, str(tmp_path / "run.svg"))
        root = ET.parse(path).getroot()
        ids = [el.get("id") for el in root.iter() if (el.get("id") or "").startswith("fov-snapshot-")]
        assert sorted(ids) == [f"fov-snapshot-{k}" for k in range(6)]
