"""Exact incidence counts, product polarity graphs and bound checks over finite fields."""

import csv
import io

from ._core import *  # noqa: F401,F403
from ._core import run as _run


def run(command, **options):
    """Run a command with keyword options named like the CLI flags.

    Underscores stand in for dashes (``gen_lines`` is ``--gen-lines``) and list
    values are joined with commas. Returns ``(exit_code, stdout, stderr)``.
    """
    flat = {}
    for key, value in options.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        flat[key] = str(value)
    return _run(command, flat)


def rows(command, **options):
    """Run ``verify`` or ``apps`` and parse the CSV rows into dictionaries."""
    code, out, err = run(command, out="csv", **options)
    if code != 0:
        raise RuntimeError(err.strip() or f"exit code {code}")
    return list(csv.DictReader(io.StringIO(out)))
