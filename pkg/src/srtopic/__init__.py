"""Topic modeling for Serbian short text.

Embedding-based pipeline (dimensionality reduction, density clustering,
class-based TF-IDF keywords, outlier reassignment) plus LDA and NMF
baselines, with NPMI coherence / topic diversity evaluation. Exposed as
a FastAPI service; the command-line interface is a thin client of it.
"""

__version__ = "0.1.0"
