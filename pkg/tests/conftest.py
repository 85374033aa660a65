import random
from fractions import Fraction

import pytest

from oscint.linalg import Mat, kernel, random_subspace
from oscint.snarl import Snarl


@pytest.fixture(scope="session")
def cltt_maps():
    """The worked-example maps on R^4 with variables (x1, x2, y1, y2):
    (x1, y1), (x2, y2), (x1+x2, y1+y2)."""
    pi0 = Mat([[1, 0, 0, 0], [0, 0, 1, 0]])
    pi1 = Mat([[0, 1, 0, 0], [0, 0, 0, 1]])
    pi2 = Mat([[1, 1, 0, 0], [0, 0, 1, 1]])
    return [pi0, pi1, pi2]


@pytest.fixture(scope="session")
def cltt_snarl(cltt_maps):
    return Snarl(4, [(f"pi{j}", kernel(pi)) for j, pi in enumerate(cltt_maps)])


def random_snarl(seed: int, m_range=(3, 8), n_range=(3, 5), need_split=True) -> Snarl:
    """Seeded generic snarl satisfying the weak codimension hypothesis,
    with at least one entry of codimension >= 2 when need_split."""
    rng = random.Random(seed)
    while True:
        m = rng.randint(*m_range)
        n = rng.randint(*n_range)
        kappas = [rng.randint(1, m - 1) for _ in range(n)]
        if max(kappas) + sum(kappas) > 2 * m:
            continue
        if need_split and max(kappas) < 2:
            continue
        entries = []
        for j, k in enumerate(kappas):
            sub = random_subspace(m, m - k, seed=rng.randrange(2**32))
            entries.append((f"v{j}", sub))
        try:
            return Snarl(m, entries)
        except ValueError:
            continue


def random_surjective_map(rng: random.Random, kappa: int, m: int, bound: int = 5) -> Mat:
    from oscint.linalg import rank

    while True:
        M = Mat([[Fraction(rng.randint(-bound, bound)) for _ in range(m)]
                 for _ in range(kappa)])
        if rank(M) == kappa:
            return M
