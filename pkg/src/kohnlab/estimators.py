"""Estimator-style wrappers: configure with parameters, ``fit`` on a domain, read trailing-underscore results."""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import dangelo, kohn
from .multitype import commutator_multitype, stratify_samples
from .poly import CPoint, HPoly, PolySyntaxError, as_point, evaluate, format_number, parse_poly


class NotRealValuedError(ValueError):
    pass


def check_hpoly(r, n: int | None = None, real: bool = True) -> HPoly:
    """Accept an HPoly or its text form; optionally require real values."""
    if isinstance(r, str):
        r = parse_poly(r, n)
    elif not isinstance(r, HPoly):
        raise TypeError(f"expected a polynomial or its text, got {type(r).__name__}")
    if n is not None and r.n != n:
        raise ValueError(f"polynomial has n={r.n}, expected {n}")
    if real and not r.is_real_valued():
        raise NotRealValuedError("defining function not real-valued")
    return r


def check_point(x, n: int, r: HPoly | None = None) -> CPoint:
    """Exact point of length n; with ``r``, it must lie on r = 0."""
    if any(isinstance(c, float) for c in (x if isinstance(x, (list, tuple)) else ())):
        raise TypeError("points must be exact (use ints, Fractions or strings)")
    p = as_point(x, n)
    if r is not None:
        v = evaluate(r, p)
        if v:
            raise ValueError(f"base point off surface: r = {format_number(v)}")
    return p


class KohnAlgorithm(BaseEstimator):
    """Run the multiplier-ideal iteration at a boundary point."""

    def __init__(self, q: int = 1, max_steps: int | None = None, radical_exponent: int | None = None,
                 max_subsets: int = 4000, n_jobs: int | None = None):
        self.q = q
        self.max_steps = max_steps
        self.radical_exponent = radical_exponent
        self.max_subsets = max_subsets
        self.n_jobs = n_jobs

    def fit(self, r, x0, n_observed: int | None = None):
        r = check_hpoly(r)
        x0 = check_point(x0, r.n, r)
        self.trace_ = kohn.run(r, x0, self.q, self.max_steps, n_observed=n_observed,
                               max_subsets=self.max_subsets, n_jobs=self.n_jobs, m_cap=self.radical_exponent)
        self.terminated_ = self.trace_.terminated
        self.termination_step_ = self.trace_.termination_step
        self.gain_ = self.trace_.final_gain
        self.ideal_ = self.trace_.steps[-1]
        return self

    def transcript(self) -> str:
        check_is_fitted(self, "trace_")
        return self.trace_.transcript()


class CommutatorMultitype(BaseEstimator):
    """Commutator multitype at points of a fixed hypersurface."""

    def __init__(self, nu: int | None = None, len_cap: int = 8):
        self.nu = nu
        self.len_cap = len_cap

    def fit(self, r, y=None):
        self.r_ = check_hpoly(r)
        self.nu_ = self.r_.n if self.nu is None else self.nu
        return self

    def transform(self, points) -> list:
        check_is_fitted(self, "r_")
        return [commutator_multitype(self.r_, check_point(p, self.r_.n, self.r_), self.nu_, self.len_cap)
                for p in points]

    def fit_transform(self, r, points):
        return self.fit(r).transform(points)

    def stratify(self, points, q: int = 1, base_point=None, n_jobs: int | None = None):
        check_is_fitted(self, "r_")
        return stratify_samples(self.r_, points, q, self.len_cap, base_point=base_point, n_jobs=n_jobs)


class DAngeloType(BaseEstimator):
    """Bounds on the q-type from the curve and embedding search."""

    def __init__(self, q: int = 1, degree_cap: int = 4, coeff_pool=None):
        self.q = q
        self.degree_cap = degree_cap
        self.coeff_pool = coeff_pool

    def fit(self, r, x):
        r = check_hpoly(r)
        x = check_point(x, r.n, r)
        pool = dangelo.DEFAULT_POOL if self.coeff_pool is None else self.coeff_pool
        self.estimate_ = dangelo.dangelo_type(r, x, self.q, self.degree_cap, pool)
        self.lower_ = self.estimate_.lower
        self.upper_ = self.estimate_.upper
        self.exact_ = self.estimate_.exact
        return self


__all__ = [
    "KohnAlgorithm",
    "CommutatorMultitype",
    "DAngeloType",
    "check_hpoly",
    "check_point",
    "NotRealValuedError",
    "PolySyntaxError",
]
