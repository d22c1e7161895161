"""Fixed-time gradient flows, settling-time bounds and regret."""

from ._fxtflow import *  # noqa: F401,F403
from ._fxtflow import __version__  # noqa: F401
