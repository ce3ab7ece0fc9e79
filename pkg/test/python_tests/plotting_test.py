import os

import pytest

from esdlab.analysis import EsdThreshold, Trajectory
from esdlab.exceptions import ValidationError

pytest.importorskip("cairo")

from esdlab.plotting import SvgPlotter, plot_concurrence_vs_alpha, plot_trajectories
from esdlab.plotting.conversions import data2pt, mm2pt, pt2mm
from esdlab.plotting.formats import figure_size
from esdlab.plotting.scales import axis_range, default_step, tick_label, ticks


def test_steps_round_up_to_sensible_values():
    assert default_step(0.2) == pytest.approx(0.2)
    assert default_step(0.17) == pytest.approx(0.2)
    assert default_step(0.22) == pytest.approx(0.25)
    assert default_step(3.2) == pytest.approx(5)
    assert default_step(7) == pytest.approx(10)


def test_ticks():
    assert ticks(0.0, 1.0, 5) == pytest.approx([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert ticks(0.05, 0.95, 4) == pytest.approx([0.25, 0.5, 0.75])
    assert [tick_label(v, 0.25) for v in ticks(0.0, 1.0, 4)] == ["0.00", "0.25", "0.50", "0.75", "1.00"]
    assert tick_label(2.0, 1.0) == "2"
    with pytest.raises(ValidationError):
        ticks(1.0, 1.0)


def test_axis_range():
    assert axis_range([0.2, 0.9, None]) == (0.2, 0.9)
    assert axis_range([0.5, 0.5]) == (0.0, 1.0)
    assert axis_range([]) == (0.0, 1.0)
    assert axis_range([-0.1, 1.2], floor=0.0, ceiling=1.0) == (0.0, 1.0)


def test_conversions():
    assert mm2pt(25.4) == pytest.approx(72.0)
    assert pt2mm(mm2pt(86.0)) == pytest.approx(86.0)
    assert data2pt(0.5, 0.0, 1.0, 10.0, 100.0) == pytest.approx(60.0)
    assert figure_size("single_column") == (86.0, 64.0)
    with pytest.raises(ValidationError):
        figure_size("poster")


def test_render_svg(tmp_path):
    path = os.path.join(str(tmp_path), "plot.svg")
    plot = SvgPlotter(x_label="P", y_label="concurrence", title="test")
    plot.add_series("with NOT", [0.0, 0.5, 1.0], [0.9, 0.4, 0.0])
    plot.add_series("baseline", [0.0, 0.5, 1.0], [0.9, 0.1, 0.0], dash="dashed", errors=[0.01, 0.02, 0.0])
    assert plot.add_marker(None, "asymptotic") is None
    plot.add_marker(0.66, "P*")
    assert plot.render(path) == path
    with open(path) as f:
        assert "<svg" in f.read()


def test_render_needs_series(tmp_path):
    with pytest.raises(ValidationError):
        SvgPlotter().render(os.path.join(str(tmp_path), "empty.svg"))
    with pytest.raises(ValidationError):
        SvgPlotter().add_series("bad", [0.0, 1.0], [0.5])
    with pytest.raises(ValidationError):
        SvgPlotter().add_series("bad", [0.0], [0.5], dash="wavy")


def test_figure_helpers(tmp_path):
    trajectory = Trajectory([0.0, 0.5, 1.0], [0.9, 0.3, 0.0], [1.0, 0.6, 1.0], label="with_not")
    trajectory.threshold = EsdThreshold.sudden_death(0.66)
    assert os.path.exists(plot_trajectories(os.path.join(str(tmp_path), "sweep.svg"), [trajectory]))
    rows = [{"alpha": a, "ideal": c, "imperfect": c - 0.01, "delta_c_first_order": 0.01}
            for a, c in ((0.0, 0.0), (0.55, 0.92), (1.0, 0.0))]
    assert os.path.exists(plot_concurrence_vs_alpha(os.path.join(str(tmp_path), "alpha.svg"), rows))
