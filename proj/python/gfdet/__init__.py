"""Maximum-likelihood device activity detection under Rician fading."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
