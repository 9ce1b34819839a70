"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``REPPRICING_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

from . import _kernels_py

python_backend = _kernels_py

if os.environ.get("REPPRICING_PURE_PYTHON", "") not in ("", "0"):
    compiled_backend = None
else:
    try:
        from . import _kernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_active = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

pure_payoffs = _active.pure_payoffs
allocate_sales = _active.allocate_sales
