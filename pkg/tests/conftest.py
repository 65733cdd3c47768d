from fractions import Fraction

import hypothesis.strategies as st

from bdecay import GENERATOR, RateLadder

positive_rates = st.fractions(
    min_value=Fraction(1, 20), max_value=Fraction(4), max_denominator=20
)


@st.composite
def rational_ladders(draw, min_states=2, max_states=8, mode=GENERATOR):
    """Irreducible ladders with small exact-rational rates."""
    width = draw(st.integers(min_value=min_states - 1, max_value=max_states - 1))
    up = draw(st.lists(positive_rates, min_size=width, max_size=width))
    down = draw(st.lists(positive_rates, min_size=width, max_size=width))
    if mode == GENERATOR:
        return RateLadder(up=up, down=down, mode=mode)
    scale = 2 * max(p + q for p, q in zip(up + [Fraction(0)], [Fraction(0)] + down)) + 1
    return RateLadder(
        up=[p / scale for p in up], down=[q / scale for q in down], mode=mode
    )
