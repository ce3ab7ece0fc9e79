# -*- coding: utf-8 -*-

"""esdlab classes to render static SVG figures of concurrence curves."""

import dataclasses
import logging
import math
import os
from typing import Optional

from esdlab.exceptions import ValidationError
from esdlab.plotting.conversions import data2pt, mm2pt
from esdlab.plotting.formats import figsizes
from esdlab.plotting.scales import axis_range, default_step, tick_label, ticks

try:
    import cairo
except ImportError:
    raise ImportError("Could not import pycairo; SVG plots only available when pycairo is available")

L = logging.getLogger("esdlab.plotting")

# line colors cycled over series, as RGB triples
PALETTE = (
    (0.00, 0.27, 0.68),
    (0.80, 0.15, 0.10),
    (0.15, 0.55, 0.20),
    (0.55, 0.30, 0.65),
    (0.90, 0.55, 0.00),
)
DASHES = {
    "solid": (),
    "dashed": (6.0, 3.0),
    "dotted": (1.5, 2.5),
}


def default_font():
    return os.environ.get("ESDLAB_FONT", "DejaVu Sans")


@dataclasses.dataclass
class Series:
    label: str
    x: list
    y: list
    color: tuple = PALETTE[0]
    dash: str = "solid"
    errors: Optional[list] = None

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValidationError("series %s has %d x values and %d y values" % (self.label, len(self.x), len(self.y)))
        if self.errors is not None and len(self.errors) != len(self.y):
            raise ValidationError("series %s needs one error bar per point" % self.label)
        if self.dash not in DASHES:
            raise ValidationError("dash must be one of %s" % ", ".join(DASHES))


@dataclasses.dataclass
class Marker:
    """Vertical line at a threshold position."""
    x: float
    label: str
    color: tuple = (0.3, 0.3, 0.3)


class SvgPlotter(object):

    """
    Main class for creating SVG line plots. Basic usage is along the lines of

    import esdlab.plotting

    plot = esdlab.plotting.SvgPlotter(x_label="P", y_label="concurrence")
    plot.add_series("with NOT", grid, concurrence)
    plot.add_marker(0.6068, "P* with NOT")
    plot.render("sweep.svg")
    """

    def __init__(self,
                 pagesize=figsizes["single_column"],
                 margin=(14.0, 4.0, 6.0, 12.0),
                 x_range=None,
                 y_range=None,
                 x_label="",
                 y_label="",
                 title="",
                 font_name=None,
                 font_size=7.0,
                 max_ticks=5,
                 step_function=default_step):
        """
        Args:
            pagesize: tuple of figure size in millimetres, see predefined sizes in esdlab.plotting.formats
            margin: (left, top, right, bottom) margins in millimetres around the plot frame
            x_range, y_range: fixed axis ranges; None fits the data of all series
            x_label, y_label, title: axis captions and figure title
            font_name: the font used each time text is written, defaults to ESDLAB_FONT
            font_size: text size in points
            max_ticks: upper bound on tick intervals per axis
            step_function: helper rounding a raw tick step to a 'sensible' value
        """
        self._pagesize = pagesize
        self._margin = margin
        self._x_range = x_range
        self._y_range = y_range
        self.x_label = x_label
        self.y_label = y_label
        self.title = title
        self.font_name = font_name or default_font()
        self.font_size = font_size
        self._max_ticks = max_ticks
        self._step_function = step_function

        self.series = []
        self.markers = []
        self._surface = None

    def add_series(self, label, x, y, color=None, dash="solid", errors=None):
        color = color or PALETTE[len(self.series) % len(PALETTE)]
        self.series.append(Series(label, [float(v) for v in x], [float(v) for v in y], color, dash,
                                  None if errors is None else [float(e) for e in errors]))
        return self.series[-1]

    def add_marker(self, x, label, color=(0.3, 0.3, 0.3)):
        """Adds a threshold marker; None (asymptotic decay) is skipped."""
        if x is None:
            L.debug("no marker for %s: asymptotic decay", label)
            return None
        self.markers.append(Marker(float(x), label, color))
        return self.markers[-1]

    def _ranges(self):
        xs = [v for s in self.series for v in s.x] + [m.x for m in self.markers]
        ys = [v for s in self.series for v in s.y]
        ys += [y + e for s in self.series if s.errors for y, e in zip(s.y, s.errors)]
        ys += [y - e for s in self.series if s.errors for y, e in zip(s.y, s.errors)]
        return (self._x_range or axis_range(xs), self._y_range or axis_range(ys))

    def _get_render_area(self):
        """Returns the plot frame (x, y, width, height) in points."""
        left, top, right, bottom = (mm2pt(m) for m in self._margin)
        width, height = (mm2pt(v) for v in self._pagesize)
        if self.title:
            top += self.font_size * 1.6
        return Rectangle(left, top, width - left - right, height - top - bottom)

    def render(self, filename):
        """Renders every series, marker and the legend to filename."""
        if not self.series:
            raise ValidationError("nothing to plot: add at least one series")
        (xr, yr) = self._ranges()
        self._surface = cairo.SVGSurface(filename, mm2pt(self._pagesize[0]), mm2pt(self._pagesize[1]))
        ctx = cairo.Context(self._surface)
        ctx.select_font_face(self.font_name, cairo.FONT_SLANT_NORMAL, cairo.FONT_WEIGHT_NORMAL)
        ctx.set_font_size(self.font_size)

        frame = self._get_render_area()
        self._render_background(ctx)
        self._render_axes(ctx, frame, xr, yr)
        self._render_markers(ctx, frame, xr)
        self._render_series(ctx, frame, xr, yr)
        self._render_legend(ctx, frame)
        if self.title:
            ctx.move_to(frame.x, mm2pt(self._margin[1]) + self.font_size)
            self.write_text(ctx, self.title, size=self.font_size * 1.15)
        self.finish()
        L.info("wrote %s (%d series, %d markers)", filename, len(self.series), len(self.markers))
        return filename

    def _render_background(self, ctx):
        ctx.save()
        ctx.set_source_rgb(1.0, 1.0, 1.0)
        ctx.rectangle(0, 0, mm2pt(self._pagesize[0]), mm2pt(self._pagesize[1]))
        ctx.fill()
        ctx.restore()

    def _render_axes(self, ctx, frame, xr, yr):
        self._render_box(ctx, frame)
        for is_x_axis, (lo, hi) in ((True, xr), (False, yr)):
            marks = ticks(lo, hi, self._max_ticks, self._step_function)
            step = marks[1] - marks[0] if len(marks) > 1 else hi - lo
            for value in marks:
                if not lo - 1e-12 <= value <= hi + 1e-12:
                    continue
                text = tick_label(value, step)
                extents = ctx.text_extents(text)
                if is_x_axis:
                    x = data2pt(value, lo, hi, frame.x, frame.width)
                    y = frame.y + frame.height
                    self._draw_line(ctx, x, y, x, y - 3, stroke_color=(0.0, 0.0, 0.0))
                    ctx.move_to(x - extents.width / 2, y + self.font_size + 2)
                else:
                    x = frame.x
                    y = data2pt(value, lo, hi, frame.y + frame.height, -frame.height)
                    self._draw_line(ctx, x, y, x + 3, y, stroke_color=(0.0, 0.0, 0.0))
                    ctx.move_to(x - extents.width - 3, y + extents.height / 2)
                self.write_text(ctx, text)
        if self.x_label:
            extents = ctx.text_extents(self.x_label)
            ctx.move_to(frame.x + (frame.width - extents.width) / 2, frame.y + frame.height + 2.2 * self.font_size + 2)
            self.write_text(ctx, self.x_label)
        if self.y_label:
            extents = ctx.text_extents(self.y_label)
            ctx.save()
            ctx.translate(frame.x - mm2pt(self._margin[0]) + self.font_size + 1, frame.y + (frame.height + extents.width) / 2)
            ctx.rotate(-math.pi / 2)
            ctx.move_to(0, 0)
            self.write_text(ctx, self.y_label)
            ctx.restore()

    def _render_markers(self, ctx, frame, xr):
        for marker in self.markers:
            if not xr[0] <= marker.x <= xr[1]:
                L.debug("marker %s at %.6g lies outside the x range", marker.label, marker.x)
                continue
            x = data2pt(marker.x, xr[0], xr[1], frame.x, frame.width)
            ctx.save()
            ctx.set_dash(DASHES["dotted"])
            self._draw_line(ctx, x, frame.y, x, frame.y + frame.height, stroke_color=marker.color)
            ctx.restore()

    def _render_series(self, ctx, frame, xr, yr):
        ctx.save()
        ctx.rectangle(frame.x, frame.y, frame.width, frame.height)
        ctx.clip()
        for s in self.series:
            points = [(data2pt(x, xr[0], xr[1], frame.x, frame.width),
                       data2pt(y, yr[0], yr[1], frame.y + frame.height, -frame.height)) for x, y in zip(s.x, s.y)]
            ctx.save()
            ctx.set_source_rgb(*s.color)
            ctx.set_line_width(1.2)
            ctx.set_dash(DASHES[s.dash])
            for i, (x, y) in enumerate(points):
                if i == 0:
                    ctx.move_to(x, y)
                else:
                    ctx.line_to(x, y)
            ctx.stroke()
            ctx.restore()
            if s.errors:
                for (x, _), y, e in zip(points, s.y, s.errors):
                    top = data2pt(y + e, yr[0], yr[1], frame.y + frame.height, -frame.height)
                    bottom = data2pt(y - e, yr[0], yr[1], frame.y + frame.height, -frame.height)
                    self._draw_line(ctx, x, top, x, bottom, line_width=0.6, stroke_color=s.color)
        ctx.restore()

    def _render_legend(self, ctx, frame, line_length=14.0):
        """Legend entries stacked in the top right corner of the frame."""
        entries = [(s.label, s.color, DASHES[s.dash]) for s in self.series]
        entries += [("%s = %.4g" % (m.label, m.x), m.color, DASHES["dotted"]) for m in self.markers]
        width = max(ctx.text_extents(label).x_advance for label, _, _ in entries) + line_length + 8
        height = len(entries) * (self.font_size + 3) + 4
        box = Rectangle(frame.x + frame.width - width - 4, frame.y + 4, width, height)
        self._render_box(ctx, box, stroke_color=(0.7, 0.7, 0.7))
        y = box.y + 2 + self.font_size / 2
        for label, color, dash in entries:
            ctx.save()
            ctx.set_dash(dash)
            self._draw_line(ctx, box.x + 3, y + 1, box.x + 3 + line_length, y + 1, line_width=1.2, stroke_color=color)
            ctx.restore()
            ctx.move_to(box.x + line_length + 6, y + self.font_size / 2)
            self.write_text(ctx, label)
            y += self.font_size + 3

    def _draw_line(self, ctx, start_x, start_y, end_x, end_y, line_width=0.8, stroke_color=(0.5, 0.5, 0.5)):
        """
        Stroke a straight segment, by default a thin gray axis or tick.
        """
        ctx.save()

        ctx.move_to(start_x, start_y)
        ctx.line_to(end_x, end_y)
        ctx.set_source_rgb(*stroke_color)
        ctx.set_line_width(line_width)
        ctx.stroke()

        ctx.restore()

    def _render_box(self, ctx, rectangle, stroke_color=(0.0, 0.0, 0.0), fill_color=(1.0, 1.0, 1.0)):
        """
        Fill and outline the plot frame; white with a black border unless told otherwise.
        """
        ctx.save()

        ctx.set_line_width(0.8)
        ctx.set_source_rgb(*fill_color)
        ctx.rectangle(rectangle.x, rectangle.y, rectangle.width, rectangle.height)
        ctx.fill()

        ctx.set_source_rgb(*stroke_color)
        ctx.rectangle(rectangle.x, rectangle.y, rectangle.width, rectangle.height)
        ctx.stroke()

        ctx.restore()

    def write_text(self, ctx, text, size=None, stroke_color=(0.0, 0.0, 0.0)):
        """
        Writes text at the current point of the cairo Context.

        Returns:
            Rectangle covering the rendered text, used to place axis labels.
        """
        ctx.save()
        ctx.select_font_face(self.font_name, cairo.FONT_SLANT_NORMAL, cairo.FONT_WEIGHT_NORMAL)
        ctx.set_font_size(size or self.font_size)
        ctx.set_source_rgb(*stroke_color)
        extents = ctx.text_extents(text)
        ctx.show_text(text)
        ctx.restore()
        return (extents.x_bearing, extents.y_bearing, extents.width, extents.height)

    def finish(self):
        """Finishes the cairo surface, flushing the SVG document."""
        if self._surface:
            self._surface.finish()
            self._surface = None

    def get_width(self):
        """Returns figure's width."""
        return self._pagesize[0]

    def get_height(self):
        """Returns figure's height."""
        return self._pagesize[1]


class Rectangle(object):

    def __init__(self, x=0, y=0, width=0, height=0):
        self.x = x
        self.y = y
        self.width = width
        self.height = height

    def __repr__(self):
        return "({}, {}, {}, {})".format(self.x, self.y, self.width, self.height)


def plot_trajectories(filename, trajectories, title="", x_label="P"):
    """
    One concurrence curve per trajectory with its sudden-death threshold
    marker. Purity is drawn dashed in the same color.
    """
    plot = SvgPlotter(x_range=(0.0, 1.0), y_range=(0.0, 1.0), x_label=x_label, y_label="concurrence / purity",
                      title=title)
    for i, trajectory in enumerate(trajectories):
        color = PALETTE[i % len(PALETTE)]
        name = trajectory.label or "curve %d" % (i + 1)
        plot.add_series(name, trajectory.grid, trajectory.concurrence, color=color)
        plot.add_series("purity (%s)" % name, trajectory.grid, trajectory.purity, color=color, dash="dashed")
        if trajectory.threshold is not None and trajectory.threshold.is_sudden_death:
            plot.add_marker(trajectory.threshold.value, "%s* (%s)" % (x_label, name), color=color)
    return plot.render(filename)


def plot_concurrence_vs_alpha(filename, rows, title="maximum measurable concurrence"):
    """Ideal and imperfect concurrence over α, the imperfect curve with ±ΔC bars."""
    alphas = [row["alpha"] for row in rows]
    plot = SvgPlotter(x_range=(0.0, 1.0), y_range=(0.0, 1.0), x_label="alpha", y_label="concurrence", title=title)
    plot.add_series("ideal", alphas, [row["ideal"] for row in rows])
    plot.add_series("imperfect", alphas, [row["imperfect"] for row in rows], dash="dashed",
                    errors=[abs(row["delta_c_first_order"]) for row in rows])
    return plot.render(filename)
