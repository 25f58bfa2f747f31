"""Specific emitter identification: decomposition features and sparse
representation classification (SRC) over a labeled dictionary.

A feature vector is the concatenation, over the ``K`` modes, of the mode's
retained magnitude spectrum averaged into ``D`` equal-width bands and
L2-normalized, followed by the ``K`` centre frequencies scaled to ``[0, 1)``.
SRC codes a query with orthogonal matching pursuit over all atoms and picks
the class whose own coefficients reconstruct it best.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UndecidableError

__all__ = [
    "extract_features",
    "Dictionary",
    "build_dictionary",
    "omp",
    "src_classify",
    "ClassificationReport",
    "evaluate",
]

DEFAULT_BANDS = 32
DEFAULT_SPARSITY = 10


def _band_edges(n, D):
    return np.round(np.linspace(0, n, D + 1)).astype(int)


def extract_features(result, D=DEFAULT_BANDS):
    """Feature vector of length ``K * D + K`` from a VMD or JVMD result."""
    if D < 4:
        raise InvalidInputError(f"need at least 4 bands per mode, got {D}")
    spectra = np.asarray(result.mode_spectra)
    n = spectra.shape[1] // 2
    if n < D:
        raise InvalidInputError(f"{n} retained bins cannot fill {D} bands")
    mags = np.abs(spectra[:, :n])
    edges = _band_edges(n, D)
    blocks = np.add.reduceat(mags, edges[:-1], axis=1) / np.diff(edges)
    norms = np.linalg.norm(blocks, axis=1, keepdims=True)
    blocks = np.divide(blocks, norms, out=np.zeros_like(blocks), where=norms > 0)
    return np.concatenate([blocks.ravel(), 2.0 * np.asarray(result.omegas, dtype=np.float64)])


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Unit-norm atoms stored as the columns of ``atoms`` with one label each."""

    atoms: np.ndarray
    labels: tuple

    @property
    def classes(self):
        return tuple(sorted(set(self.labels)))

    def __len__(self):
        return len(self.labels)


def build_dictionary(features, labels):
    """Stack unit-normalized training vectors as dictionary atoms, in input order."""
    features = [np.asarray(f, dtype=np.float64).ravel() for f in features]
    labels = tuple(labels)
    if not features:
        raise InvalidInputError("cannot build a dictionary without training vectors")
    if len(features) != len(labels):
        raise InvalidInputError(f"{len(features)} vectors but {len(labels)} labels")
    A = np.stack(features, axis=1)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise InvalidInputError("zero training vector cannot be normalized")
    atoms = A / norms
    atoms.setflags(write=False)
    return Dictionary(atoms, labels)


def omp(A, y, sparsity, tol=1e-12):
    """Orthogonal matching pursuit.

    Greedily selects up to ``sparsity`` columns of ``A`` (assumed unit norm)
    and returns the dense coefficient vector. Stops early once the residual
    norm falls to ``tol`` times ``||y||``.
    """
    n_atoms = A.shape[1]
    x = np.zeros(n_atoms)
    residual = y.copy()
    support = []
    stop = tol * np.linalg.norm(y)
    coef = np.zeros(0)
    for _ in range(min(sparsity, n_atoms)):
        if np.linalg.norm(residual) <= stop:
            break
        corr = np.abs(A.T @ residual)
        corr[support] = -1.0
        support.append(int(np.argmax(corr)))
        coef, *_ = np.linalg.lstsq(A[:, support], y, rcond=None)
        residual = y - A[:, support] @ coef
    x[support] = coef
    return x


def src_classify(dictionary, query, sparsity=DEFAULT_SPARSITY):
    """Classify ``query`` by minimum class-restricted reconstruction residual.

    Returns
    -------
    label
        Winning class; ties go to the smallest label.
    residuals : dict
        ``||q - A delta_c(x)||_2`` for every class ``c`` of the dictionary,
        with ``q`` the unit-normalized query.
    """
    q = np.asarray(query, dtype=np.float64).ravel()
    norm = np.linalg.norm(q)
    if norm == 0:
        raise UndecidableError("cannot classify a zero feature vector")
    if not 1 <= sparsity <= len(dictionary):
        raise InvalidInputError(f"sparsity must be in [1, {len(dictionary)}], got {sparsity}")
    q = q / norm
    x = omp(dictionary.atoms, q, sparsity)
    labels = np.asarray(dictionary.labels, dtype=object)
    residuals = {}
    for c in dictionary.classes:
        xc = np.where(labels == c, x, 0.0)
        residuals[c] = float(np.linalg.norm(q - dictionary.atoms @ xc))
    best = min(dictionary.classes, key=lambda c: (residuals[c], c))
    return best, residuals


@dataclass
class ClassificationReport:
    """Confusion counts (rows: true class, columns: predicted) and accuracy."""

    classes: tuple
    confusion: np.ndarray
    accuracy: float
    predictions: list = field(default_factory=list)

    @property
    def total(self):
        return int(self.confusion.sum())

    def as_dict(self):
        return {
            "classes": [str(c) for c in self.classes],
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
        }


def evaluate(dictionary, features, labels, sparsity=DEFAULT_SPARSITY, classifier=src_classify):
    """Classify every test vector and accumulate a confusion matrix.

    ``classifier`` takes ``(dictionary, query, sparsity)`` and returns
    ``(label, residuals)``, so alternative dictionary classifiers plug in.
    Test labels absent from the dictionary can never be predicted and count
    as errors.
    """
    labels = list(labels)
    if not labels:
        raise InvalidInputError("empty test set")
    if len(labels) != len(features):
        raise InvalidInputError(f"{len(features)} vectors but {len(labels)} labels")
    classes = tuple(sorted(set(dictionary.labels) | set(labels)))
    index = {c: i for i, c in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    predictions = []
    for f, true in zip(features, labels):
        pred, _ = classifier(dictionary, f, sparsity)
        predictions.append(pred)
        confusion[index[true], index[pred]] += 1
    accuracy = float(np.trace(confusion) / confusion.sum())
    return ClassificationReport(classes, confusion, accuracy, predictions)
