"""Figure rendering for hjs-lab CSV artifacts.

Reads the documented `series.csv` schema and regenerates the two-panel
ensemble-dynamics figure: mean position with its +/- spread band on the
left, mean momentum with the operator-dispersion band on the right, one
color per deformation-parameter value.  Pure post-processing: no physics is
recomputed here.
"""
__version__ = "0.1.0"

from .render import FigureSpec, SchemaError, build_figure, load_series, render
