"""Detection-limit-aware rSO2 time-series analysis.

Thin python layer over the C++ core: penalized-spline smoothing with
GCV, multiple imputation below the detection limit, MAUC and slope
estimation with Rubin-combined block-bootstrap standard errors,
imputation-nested permutation tests, and the linear-process-bootstrap
simulation harness.
"""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, analyze, parse_session, parse_session_meta, run_scenario_file


def load_session(csv_path, meta_path):
    """Parse a session from a CSV file and its metadata JSON file."""
    with open(csv_path, "r", encoding="utf-8") as f:
        csv_text = f.read()
    with open(meta_path, "r", encoding="utf-8") as f:
        meta = parse_session_meta(f.read())
    return parse_session(csv_text, meta)


def analyze_dict(session, **kwargs):
    """analyze(), but parsed into a python dict."""
    return _json.loads(analyze(session, **kwargs))


def simulate(scenario_path, workers=1, seed=None):
    """Run a scenario file; returns (files dict, summary dict)."""
    files, summary = run_scenario_file(scenario_path, workers, seed)
    return files, _json.loads(summary)
