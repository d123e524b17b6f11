from ._ssmrec import *  # noqa: F401,F403
