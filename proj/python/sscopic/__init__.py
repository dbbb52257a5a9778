"""Quadrature statistics and S-scopic superposition criteria.

Reports come back as dicts decoded from the same JSON the CLI prints.
"""

import json

from . import _sscopic
from ._sscopic import (
    SscopicError,
    bin_stats,
    decompose,
    moments,
    sample,
    sample_joint_p,
    sample_sum,
    tmss_inference,
)

__all__ = [
    "SscopicError",
    "analyze",
    "bin_stats",
    "coherent_superposition_size",
    "curve",
    "decompose",
    "evaluate_binned",
    "moments",
    "sample",
    "sample_joint_p",
    "sample_sum",
    "smax",
    "theorem4_smax",
    "theorem5_smax",
    "tmss_inference",
    "verify",
]


def analyze(config, x, p=None, joint=None):
    """Run the analysis pipeline. ``config`` is a dict in the --config format."""
    x = [float(v) for v in x]
    p = None if p is None else [float(v) for v in p]
    if joint is not None:
        joint = ([float(v) for v in joint[0]], [float(v) for v in joint[1]])
    return json.loads(_sscopic.analyze(json.dumps(config), x, p, joint))


def evaluate_binned(criterion, x, S, var_p_like):
    return json.loads(_sscopic.evaluate_binned(criterion, [float(v) for v in x], S, var_p_like))


def theorem4_smax(delta_p):
    return json.loads(_sscopic.theorem4_smax(delta_p))


def theorem5_smax(stdev, variant="inference"):
    return json.loads(_sscopic.theorem5_smax(stdev, variant))


def coherent_superposition_size(var_p):
    return json.loads(_sscopic.coherent_superposition_size(var_p))


def smax(state, criterion, s_hi=None):
    return json.loads(_sscopic.smax(state, criterion, s_hi))


def curve(task, start=None, stop=None, points=None):
    """Returns (header, rows) of a named curve."""
    lines = _sscopic.curve(task, start, stop, points).splitlines()
    return lines[0].split(","), [[float(v) for v in line.split(",")] for line in lines[1:]]


def verify(suite, trials=100, seed=0):
    return json.loads(_sscopic.verify(suite, trials, seed))
