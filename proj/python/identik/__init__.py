from identik._core import *  # noqa: F401,F403
from identik._core import __doc__  # noqa: F401
