"""textlens: topic discovery, zero-shot labeling, and semantic retrieval.

Pipeline: ingest (clean/split/chunk) -> embed -> reduce + cluster ->
c-TF-IDF topics -> zero-shot labels -> exact top-k retrieval -> evaluation.
"""

__version__ = "0.1.0"

from . import cluster, embed, evalkit, index, ingest, label, topics  # noqa: F401
from .errors import LensError  # noqa: F401
