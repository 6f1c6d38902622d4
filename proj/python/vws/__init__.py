"""Virtual wheel-speed sensor lab: C++ core with Python bindings.

The heavy lifting (drivetrain simulation, encoder models, Butterworth
design, PSO, sequence models with manual backprop, evaluation) lives in the
compiled `_core` extension; this package re-exports its public surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
