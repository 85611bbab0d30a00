"""Boundary recovery from singularities of the Radon transform."""

import json

from ._core import *  # noqa: F401,F403
from ._core import run_examples_json


def run_examples(**kwargs):
    """Disk, annulus and parabola examples as a dict report."""
    return json.loads(run_examples_json(**kwargs))
