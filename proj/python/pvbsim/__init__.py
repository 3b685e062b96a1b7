"""Grid-connected PV-battery DC microgrid simulator."""

from pvbsim._core import *  # noqa: F401,F403
from pvbsim._core import __version__  # noqa: F401
