"""Hot-path kernels with backend selection at import.

The compiled Cython extension (``_fastkin``) is preferred; the numpy
implementation (``_purekin``) is the fallback.  Set TELEFILTER_PURE_PYTHON=1
to force the fallback, e.g. for benchmarking or debugging.
"""

from __future__ import annotations

import os

from . import _purekin

if os.environ.get("TELEFILTER_PURE_PYTHON") == "1":
    _impl = _purekin
else:
    try:
        from . import _fastkin as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _purekin

fk = _impl.fk
jacobian = _impl.jacobian
resolved_rate = _impl.resolved_rate
BACKEND = _impl.BACKEND_NAME


def available_backends():
    """All importable backend modules, compiled one first."""
    backends = []
    try:
        from . import _fastkin

        backends.append(_fastkin)
    except ImportError:
        pass
    backends.append(_purekin)
    return backends
