"""Kernel backend selection.

The Wigner d-table recursion is the hot inner kernel of every transform and
Monte-Carlo ensemble. A compiled Cython implementation is used when the
extension was built; otherwise (or when SPHSTOCH_NO_EXT=1) the pure-numpy
twin takes over. Both produce the same tables.
"""

import os

from . import _dtable_py

d_table_python = _dtable_py.d_table
d_table_compiled = None

if os.environ.get("SPHSTOCH_NO_EXT") != "1":
    try:
        from . import _dtable

        d_table_compiled = _dtable.d_table
    except ImportError:
        d_table_compiled = None

if d_table_compiled is not None:
    BACKEND = "compiled"
    d_table = d_table_compiled
else:
    BACKEND = "python"
    d_table = d_table_python
