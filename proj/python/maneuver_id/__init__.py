"""MMAE maneuver identification: Kalman filter bank over straight and
lane-change motion models, with a single-track vehicle simulator and
experiment runners."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
