"""mapfigs: standard figures for randgeo experiment outputs.

Each figure kind reads the runner's documented CSV files (validated against
their directory manifest), writes one image and one JSON fit report. The
reports are byte-stable given identical inputs, so downstream checks can
diff them directly.
"""

__version__ = "0.1.0"

FIGURE_KINDS = (
    "profile-hist",
    "two-point-ks",
    "ball-volume",
    "hull-laplace",
    "component-exponent",
)
