"""Selects the linear-policy kernel implementation at import time.

Prefers the compiled extension; falls back to numpy when the extension was
not built or when MDDIAL_PURE_PYTHON=1 is set (used by the benchmark and by
tests that pin one backend).
"""

import os

if os.environ.get("MDDIAL_PURE_PYTHON") == "1":
    from mddial import pykernels as _impl

    KERNEL_BACKEND = "python"
else:
    try:
        from mddial import _ckernels as _impl

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from mddial import pykernels as _impl

        KERNEL_BACKEND = "python"

q_values = _impl.q_values
argmax_q = _impl.argmax_q
q_value_at = _impl.q_value_at
add_scaled = _impl.add_scaled
