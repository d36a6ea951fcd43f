"""Figures from rankdec experiment CSVs.

Consumes only the public file contract (the CSV schema and the
`.summary.json` sidecar); statistics are read from the sidecar, never
recomputed.  Rendering is read-only over its inputs and byte-deterministic
for identical inputs.
"""

from .reader import EXPECTED_HEADER, LoadedRun, SchemaError, load_run
from .render import PlotJob, render

__version__ = "0.1.0"
