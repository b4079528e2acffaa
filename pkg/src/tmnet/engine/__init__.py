"""Simulation engine: compiled stepping kernel with a pure-Python fallback.

The compiled kernel is preferred when its extension module imports; set
TMNET_PURE_KERNEL=1 to force the fallback. Both kernels are behavioral
twins and produce identical record streams.
"""

import os

from . import _kernel_py

if os.environ.get("TMNET_PURE_KERNEL"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernel_py

BACKEND = _impl.BACKEND
run_encoded = _impl.run_encoded
levenshtein = _impl.levenshtein
