"""Some predefined figure sizes in millimetres (width, height)."""

from esdlab.exceptions import ValidationError

figsizes = {
    "single_column": (86.0, 64.0),
    "single_column_square": (86.0, 86.0),
    "one_and_half_column": (130.0, 90.0),
    "double_column": (178.0, 110.0),
    "slide": (254.0, 142.9),
    "a5l": (210.0, 148.0),
    "a4l": (297.0, 210.0),
    "letterl": (279.0, 216.0),
}


def figure_size(name):
    try:
        return figsizes[name]
    except KeyError:
        raise ValidationError("unknown figure size %r, expected one of %s"
                              % (name, ", ".join(sorted(figsizes))))
