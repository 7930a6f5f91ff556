import numpy as np
from hypothesis import strategies as st


def disk_points(max_modulus=0.9):
    return st.builds(lambda r, t: r * np.exp(1j * t),
                     st.floats(0, max_modulus), st.floats(0, 2 * np.pi))


def alpha_lists(min_size=1, max_size=8, max_modulus=0.9):
    return st.lists(disk_points(max_modulus), min_size=min_size, max_size=max_size).map(
        lambda xs: np.array(xs, dtype=complex))
