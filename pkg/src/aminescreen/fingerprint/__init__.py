"""Fragment-count fingerprints and their PCA reduction."""

from .fragments import CountFingerprint, atom_environments, environment_key, fingerprint, vectorize
from .pca import PCAModel, fit_pca, inverse_project, project, transform
from .transformers import FragmentVectorizer, VariancePCA

__all__ = [
    "CountFingerprint", "FragmentVectorizer", "PCAModel", "VariancePCA", "atom_environments",
    "environment_key", "fingerprint", "fit_pca", "inverse_project", "project", "transform", "vectorize",
]
