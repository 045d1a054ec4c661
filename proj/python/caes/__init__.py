from ._caes import *  # noqa: F401,F403
from ._caes import __doc__  # noqa: F401
