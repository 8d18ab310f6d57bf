"""LPV filtered-B-splines feedforward for prismatic delta printers."""

from ._deltafbs import *  # noqa: F401,F403
from ._deltafbs import __doc__  # noqa: F401
