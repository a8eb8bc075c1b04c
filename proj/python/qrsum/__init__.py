# qrsum - query-relevant video summarization
#
# Licensed under the terms of the Apache 2.0 License.
# See LICENSE file in the project root for terms.

"""Python bindings for the qrsum C++ core."""

from ._qrsum import *  # noqa: F401,F403
from ._qrsum import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = _core_doc
