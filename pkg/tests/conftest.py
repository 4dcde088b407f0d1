import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coalition_var import make_tabular

# three-player game with equal values but unequal uncertainties:
# exact profiles are v = (20, 20, 20), r = (299, 230, 155)
EX2_VALUES = {
    (0,): 0.0,
    (1,): 3.0,
    (2,): 6.0,
    (0, 1): 24.0,
    (1, 2): 18.0,
    (0, 2): 21.0,
    (0, 1, 2): 60.0,
}
EX2_V = (20.0, 20.0, 20.0)
EX2_R = (299.0, 230.0, 155.0)


@pytest.fixture
def ex2():
    return make_tabular(3, EX2_VALUES)


def random_values(rng: np.random.Generator, n: int) -> np.ndarray:
    vals = rng.uniform(-1.0, 1.0, 1 << n)
    vals[0] = 0.0
    return vals


def rel_close(a, b, rtol):
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))
