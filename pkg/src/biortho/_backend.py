"""Select the Jacobi sweep kernel at import time.

The compiled extension is used when it was built; otherwise, or when
``BIORTHO_PURE_PYTHON=1`` is set, the pure-Python kernel is used.
"""

import os

from . import _jacobi_py

KERNELS = {"python": _jacobi_py}

try:
    from . import _jacobi_ext
except ImportError:  # extension not built
    _jacobi_ext = None
else:
    KERNELS["compiled"] = _jacobi_ext

if os.environ.get("BIORTHO_PURE_PYTHON") == "1" or _jacobi_ext is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"

kernel = KERNELS[BACKEND]
