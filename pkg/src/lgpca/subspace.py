"""PCA subspace fitting and projection.

When there are more feature dimensions than samples the eigenvectors are
obtained from the n x n Gram matrix of the centered data (the "snapshot"
trick) instead of the d x d covariance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_vector
from .errors import DegenerateData, DimensionMismatch, InvalidParams, TooFewSamples


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray         # (d,)
    basis: np.ndarray        # (d, k), orthonormal columns
    eigenvalues: np.ndarray  # (k,), nonincreasing

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of every column made positive; first one wins ties
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _rank_cutoff(eigvals: np.ndarray, n: int, d: int) -> int:
    top = eigvals[0] if eigvals.size else 0.0
    if top <= 0.0:
        return 0
    tol = max(n, d) * np.finfo(np.float64).eps * top
    return int(np.count_nonzero(eigvals > tol))


def fit_pca(X, k: int, method: str = "auto") -> PcaModel:
    """Fit a rank-``k`` PCA model to the rows of ``X``.

    ``method`` is ``"gram"``, ``"covariance"`` or ``"auto"`` (Gram when d > n).
    The retained rank is clamped to the numerical rank of the centered data.
    Covariance uses the n-1 divisor.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-D, got shape {X.shape}")
    n, d = X.shape
    if n < 2:
        raise TooFewSamples(f"PCA needs at least 2 samples, got {n}")
    if k < 1:
        raise InvalidParams(f"rank must be >= 1, got {k}")
    if method == "auto":
        method = "gram" if d > n else "covariance"
    if method not in ("gram", "covariance"):
        raise InvalidParams(f"unknown PCA method {method!r}")

    mean = X.mean(axis=0)
    Xc = X - mean
    if method == "gram":
        gram = Xc @ Xc.T / (n - 1)
        eigvals, eigvecs = np.linalg.eigh(gram)
    else:
        cov = Xc.T @ Xc / (n - 1)
        eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals, kind="stable")[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    rank = _rank_cutoff(eigvals, n, d)
    if rank == 0:
        raise DegenerateData("all training rows are identical")
    k = min(k, rank)
    eigvals = eigvals[:k]
    if method == "gram":
        # v = Xc^T u / sqrt((n-1) lambda) has unit norm for a Gram eigenpair (lambda, u)
        basis = Xc.T @ eigvecs[:, :k] / np.sqrt((n - 1) * eigvals)
        # small eigenvalues amplify rounding; restore exact orthonormality, keeping directions
        q, r = np.linalg.qr(basis)
        basis = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    else:
        basis = eigvecs[:, :k]
    basis = _fix_signs(basis)
    eigvals = np.maximum(eigvals, 0.0)
    for arr in (mean, basis, eigvals):
        arr.setflags(write=False)
    return PcaModel(mean, basis, eigvals)


def project(model: PcaModel, x) -> np.ndarray:
    """Coordinates of ``x`` (a d-vector or an n x d batch) in the PCA basis."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        check_vector(x, model.dim)
        return model.basis.T @ (x - model.mean)
    if x.ndim != 2 or x.shape[1] != model.dim:
        raise DimensionMismatch(f"expected (n, {model.dim}) input, got shape {x.shape}")
    return (x - model.mean) @ model.basis


def reconstruct(model: PcaModel, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != model.rank:
        raise DimensionMismatch(f"expected {model.rank} coordinates, got {z.shape[-1]}")
    return model.mean + z @ model.basis.T


def truncate(model: PcaModel, k: int) -> PcaModel:
    """Keep only the leading ``k`` components."""
    k = min(k, model.rank)
    return PcaModel(model.mean, model.basis[:, :k], model.eigenvalues[:k])


class SnapshotPCA(TransformerMixin, BaseEstimator):
    """scikit-learn wrapper around :func:`fit_pca`.

    Parameters
    ----------
    n_components : int
        Requested rank; the fitted rank may be smaller (at most n_samples - 1).
    method : {"auto", "gram", "covariance"}
    """

    def __init__(self, n_components=32, method="auto"):
        self.n_components = n_components
        self.method = method

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=2)
        self.model_ = fit_pca(X, self.n_components, self.method)
        self.n_features_in_ = X.shape[1]
        self.n_components_ = self.model_.rank
        self.mean_ = self.model_.mean
        self.components_ = self.model_.basis.T
        self.explained_variance_ = self.model_.eigenvalues
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        return project(self.model_, X)

    def inverse_transform(self, X):
        check_is_fitted(self, "model_")
        return reconstruct(self.model_, check_array(X))
