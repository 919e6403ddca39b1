try:
    from ._shiftgamma import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    from _shiftgamma import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)
