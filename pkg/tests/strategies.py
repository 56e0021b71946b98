from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from g2scale.forms import DIM, KForm
from g2scale.scalars import ExactScalar

rationals = st.fractions(min_value=-6, max_value=6, max_denominator=6)
nonzero_rationals = rationals.filter(lambda q: q != 0)


@st.composite
def exact_scalars(draw, rational_only=False):
    a = draw(rationals)
    b = Fraction(0) if rational_only else draw(rationals)
    return ExactScalar(a, b)


@st.composite
def exact_vectors(draw):
    return np.array([ExactScalar(draw(rationals)) for _ in range(DIM)], dtype=object)


@st.composite
def exact_forms(draw, degree):
    form = KForm.zero(degree)
    for n in range(len(form.values)):
        if draw(st.booleans()):
            form.values[n] = ExactScalar(draw(rationals))
    return form
