"""Unit conversion helpers."""

def mm2pt(x, pt_size=25.4/72.0):
    """Converts distance from millimetres to points. Default value is SVG/PDF point size."""
    return x / pt_size

def pt2mm(x, pt_size=25.4/72.0):
    """Converts distance from points to millimetres. Default value is SVG/PDF point size."""
    return x * pt_size

def data2pt(value, lo, hi, start, length):
    """Maps a data value in [lo, hi] linearly onto [start, start + length] points."""
    return start + (value - lo) / (hi - lo) * length
