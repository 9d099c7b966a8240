"""scikit-learn style wrappers so spectra, thermodynamics and classification compose in a Pipeline.

    >>> from sklearn.pipeline import make_pipeline
    >>> pipe = make_pipeline(SpectrumSolver(k=32), CanonicalThermo(temperature=300.0))
    >>> table = pipe.fit_transform([InfiniteWell(L=50.0), InfiniteWell(L=100.0)])

Inputs to :class:`SpectrumSolver` are potential specs (or their dict form),
not numeric features, so it skips ``check_array``.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import eigensolver, potentials, thermo
from .core import DomainError
from .spontaneity import DEFAULT_EPSILON, SpontaneityClass, classify_arrays

THERMO_COLUMNS = ("zeta", "F_tilde", "U_tilde", "S_tilde", "C_tilde")


class SpectrumSolver(TransformerMixin, BaseEstimator):
    """Map potential specs to rows of their ``k`` lowest energies (eV)."""

    def __init__(self, k=10, n_interior=eigensolver.DEFAULT_N_INTERIOR,
                 rel_tol=eigensolver.DEFAULT_REL_TOL, refine=True, extrapolate=False,
                 max_points=eigensolver.DEFAULT_MAX_POINTS):
        self.k = k
        self.n_interior = n_interior
        self.rel_tol = rel_tol
        self.refine = refine
        self.extrapolate = extrapolate
        self.max_points = max_points

    def fit(self, X, y=None):
        if self.k < 1:
            raise DomainError("k must be at least 1")
        return self

    def transform(self, X):
        specs = [potentials.from_dict(s) if isinstance(s, dict) else s for s in X]
        rows = []
        converged = []
        for spec in specs:
            spectrum = eigensolver.solve(
                spec, self.k, n_interior=self.n_interior, rel_tol=self.rel_tol,
                refine=self.refine, extrapolate=self.extrapolate, max_points=self.max_points,
            )
            rows.append(spectrum.levels)
            converged.append(spectrum.converged)
        # per-call diagnostics; not fitted state
        self.converged_ = np.array(converged, dtype=bool)
        return np.vstack(rows) if rows else np.empty((0, self.k))

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        return tags


class CanonicalThermo(TransformerMixin, BaseEstimator):
    """Rows of level energies (eV) to ``[zeta, F, U, S, C]`` per k_B T.

    ``mode="two_level"`` keeps only the first two columns of each row.
    """

    def __init__(self, temperature=300.0, mode="n_level"):
        self.temperature = temperature
        self.mode = mode

    def fit(self, X, y=None):
        X = check_array(X)
        if self.mode not in ("two_level", "n_level"):
            raise DomainError(f"mode must be 'two_level' or 'n_level', got {self.mode!r}")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} levels per row, got {X.shape[1]}")
        out = np.empty((X.shape[0], len(THERMO_COLUMNS)))
        for i, row in enumerate(X):
            q, _ = thermo.thermo_from_levels(np.sort(row), self.temperature, self.mode)
            out[i] = q.as_tuple()
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(THERMO_COLUMNS, dtype=object)


class SpontaneityClassifier(ClassifierMixin, BaseEstimator):
    """Label rows of ``[F, U, S]`` (per k_B T) by the class of the move from a reference row.

    ``fit`` picks the reference as ``X[reference_index]``; ``y`` is ignored.
    """

    def __init__(self, epsilon=DEFAULT_EPSILON, reference_index=0):
        self.epsilon = epsilon
        self.reference_index = reference_index

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] != 3:
            raise ValueError("expected columns [F, U, S]")
        self.reference_ = X[self.reference_index].copy()
        self.classes_ = np.array([c.value for c in SpontaneityClass], dtype=object)
        self.n_features_in_ = 3
        return self

    def predict(self, X):
        check_is_fitted(self, "reference_")
        X = check_array(X)
        d = X - self.reference_
        labels = classify_arrays(d[:, 0], d[:, 1], d[:, 2], self.epsilon)
        return np.array([c.value for c in labels], dtype=object)
