"""Distribution-preserving differentially private count mechanisms."""

try:
    from countdist._countdist import *  # noqa: F401,F403  (installed layout)
    from countdist._countdist import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on PYTHONPATH directly
    from _countdist import *  # noqa: F401,F403
    from _countdist import __version__  # noqa: F401
