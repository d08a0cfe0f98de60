"""Select the Karp kernel backend at import time.

The compiled extension is used when it was built; set
``SBCN_OPT_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

if os.environ.get("SBCN_OPT_PURE_PYTHON", "").strip() not in ("", "0") or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_active = BACKENDS[BACKEND]
karp_fill = _active.karp_fill
karp_min_mean = _active.karp_min_mean


def get_backend(name: str):
    """Kernel module by name (``"python"`` or ``"cython"``)."""
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {sorted(BACKENDS)}") from None
