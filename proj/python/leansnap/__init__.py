"""Virtual-time simulation of snapshot-based parallel proof search."""

try:
    from . import _leansnap as _impl
    from ._leansnap import *  # noqa: F401,F403
except ImportError:  # extension on sys.path directly (in-tree builds)
    import _leansnap as _impl
    from _leansnap import *  # noqa: F401,F403

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
