"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``OKCONN_BACKEND=python``
to force the pure-Python twin.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("OKCONN_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

dijkstra = _impl.dijkstra
tree_edge_loads = _impl.tree_edge_loads
steiner_relax = _impl.steiner_relax
tree_length = _impl.tree_length
