"""Figure rendering for the shcycles CSV outputs; consumes only the frozen
CSV schemas, never recomputes mathematics."""

from .figures import (
    SchemaError,
    read_points,
    read_stats,
    render_class_bars,
    render_convergence,
    render_domain_scatter,
)

__version__ = "0.1.0"
