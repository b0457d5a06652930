"""Amine screening for CO2 capture.

Modules: ``chem`` (SMILES graphs), ``fingerprint`` (fragment counts and
PCA), ``labels`` (class thresholds), ``learn`` (classifiers, metrics,
model selection), ``signal`` (NDIR absorption traces), ``generate``
(matched-pair candidates) and ``cli`` (the file-driven pipeline).
"""

__version__ = "0.1.0"
