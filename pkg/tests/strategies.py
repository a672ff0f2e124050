"""Hypothesis strategies for small exact polynomials, points and forms."""

from fractions import Fraction

from hypothesis import strategies as st

from kohnlab.forms import PForm
from kohnlab.poly import CPoint, GaussianRational, HPoly, conj

small_fraction = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))
gaussian = st.builds(GaussianRational, small_fraction, small_fraction)


def exponents(n, top=2):
    return st.tuples(*[st.integers(0, top)] * n)


def hpolys(n=2, max_terms=4, top=2):
    term = st.tuples(st.tuples(exponents(n, top), exponents(n, top)), gaussian)
    return st.lists(term, max_size=max_terms).map(lambda ts: HPoly(n, ts))


def real_hpolys(n=2, max_terms=3, top=2):
    return hpolys(n, max_terms, top).map(lambda f: f + conj(f))


def points(n=2):
    return st.lists(gaussian, min_size=n, max_size=n).map(lambda cs: CPoint(tuple(cs)))


def forms(n=2, max_terms=3):
    slots = st.sets(st.integers(0, 2 * n - 1), min_size=1, max_size=2).map(lambda s: tuple(sorted(s)))
    term = st.tuples(slots, hpolys(n, 2, 1))
    return st.lists(term, min_size=1, max_size=max_terms).map(lambda ts: PForm(n, ts))


def homogeneous_forms(n=2, degree=1, max_terms=3):
    slots = st.sets(st.integers(0, 2 * n - 1), min_size=degree, max_size=degree).map(lambda s: tuple(sorted(s)))
    term = st.tuples(slots, hpolys(n, 2, 1))
    return st.lists(term, min_size=1, max_size=max_terms).map(lambda ts: PForm(n, ts))
