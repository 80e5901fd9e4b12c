"""Python access to the qcf solver: validate configs, run, verify, read outputs."""

import csv
import io
import json
import os

from ._qcf import QcfError, format_double, read_snapshot, version
from . import _qcf

__all__ = ["QcfError", "check_config", "run", "verify", "read_snapshot", "series", "invariants", "version",
           "format_double"]


def _text(config):
    if isinstance(config, (str, os.PathLike)) and os.path.exists(config):
        with open(config, encoding="utf-8") as f:
            return f.read()
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, str):
        return config
    raise TypeError("config must be a dict, JSON text or a path")


def check_config(config):
    """Validate a config (dict, JSON text or path); returns it as a dict."""
    return json.loads(_qcf.normalize_config(_text(config)))


def run(config, out_dir):
    """Run to completion; returns status, message, steps, t_final, records."""
    return _qcf.run(_text(config), os.fspath(out_dir))


def verify(suite="algebra", out_dir="", quick=True):
    """Returns (passed, summary_table)."""
    return _qcf.verify(suite, os.fspath(out_dir), quick)


def series(run_dir, quantity):
    """(t, values) lists for one invariants column."""
    text = _qcf.extract_series(os.path.join(os.fspath(run_dir), "invariants.csv"), quantity)
    rows = list(csv.reader(io.StringIO(text)))[1:]
    return [float(r[0]) for r in rows], [float(r[1]) for r in rows]


def invariants(run_dir):
    """Whole invariants table as a dict of column name to float list."""
    with open(os.path.join(os.fspath(run_dir), "invariants.csv"), newline="") as f:
        rows = list(csv.reader(f))
    return {name: [float(r[i]) for r in rows[1:]] for i, name in enumerate(rows[0])}
