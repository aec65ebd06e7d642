"""Two coupled oscillators between two thermal baths."""

from ._duet import *  # noqa: F401,F403
from ._duet import __doc__  # noqa: F401

__version__ = "0.1.0"
