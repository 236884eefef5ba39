from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import aiounittest
import numpy as np

from fatlab.exactnum import CirclePoint, MatQ
from fatlab.presets import PresetLibrary, default_library
from fatlab.registry import ClaimRecord, Registry
from fatlab.spin import CirclePattern
from fatlab.utils import Config

SEED = 1729

# partition -> (torus weights, lift speeds (A, B), gcd witness value or 'undefined' or None, free)
SU2_TABLE_ROWS: Dict[Tuple[int, ...], Tuple[Tuple[int, ...], Tuple[Tuple[int, ...], Tuple[int, ...]], object, bool]] = {
    (5, 1, 1, 1): ((4, 2, 0, 0), ((-1, -1, -3, 3), (-3, 3, 1, -1)), 3, False),
    (4, 4): ((3, 3, 1, 1), ((0, 0, -2, 4), (-3, 3, 1, 1)), 3, False),
    (3, 2, 2, 1): ((2, 1, 1, 0), ((0, -1, -1, 2), (-2, 1, 1, 0)), 2, False),
    (3, 1, 1, 1, 1, 1): ((2, 0, 0, 0), ((-1, -1, -1, 1), (-1, 1, 1, -1)), None, True),
    (2, 2, 2, 2): ((1, 1, 1, 1), ((0, 0, 0, 2), (-1, 1, 1, 1)), None, True),
    (2, 2, 1, 1, 1, 1): ((1, 1, 0, 0), ((0, 0, -1, 1), (-1, 1, 0, 0)), 'undefined', False),
    (7, 1): ((6, 4, 2, 0), ((0, -2, -4, 6), (-6, 4, 2, 0)), 6, False),
    (5, 3): ((4, 2, 2, 0), ((0, -2, -2, 4), (-4, 2, 2, 0)), 4, False),
    (3, 3, 1, 1): ((2, 2, 0, 0), ((0, 0, -2, 2), (-2, 2, 0, 0)), 2, False),
}

SURVIVING_TRIPLES = {
    'so2-so3-so4',
    '0-so3-so4',
    'u1-u2-u1so4',
    'so3-so4-so3so4',
    'su3-g2-so7',
    'g2-so7-so8',
}

FREE_FAMILY_PATTERN = (1, 1, 1, 9)
NONFREE_PATTERN = (1, 1, 1, 1)
FINITE_PATTERN = (0, 2, -1, 1)
SPHERE6_PATTERNS = {(0, 0, 1, 1), (0, 0, 1, -1), (0, 2, -1, 1)}


def lift_up_to_sign(row) -> Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]:
    """The lift speeds (A, B) of a table row and their global negative."""
    a = tuple(int(value) for value in row.lift_A)
    b = tuple(int(value) for value in row.lift_B)
    return (a, b), (tuple(-value for value in a), tuple(-value for value in b))


class BaseTestCase(aiounittest.AsyncTestCase):

    def setUp(self) -> None:
        super().setUp()
        self.rng = np.random.default_rng(SEED)

    @property
    def library(self) -> PresetLibrary:
        return default_library()

    @property
    def registry(self) -> Registry:
        return Registry.load()

    def create_pattern(self, n: Sequence[int] = FREE_FAMILY_PATTERN) -> CirclePattern:
        return CirclePattern(tuple(n))

    def create_circle_points(self, count: int, bound: int = 9) -> List[CirclePoint]:
        return [CirclePoint.random(self.rng, bound) for _ in range(count)]

    def create_config(self, **overrides) -> Config:
        return Config(**{'seed': SEED, 'sample_budget': 50, 'workers': 2, **overrides})

    def create_claim(
        self,
        claim_id: str = 'test.constant',
        op: str = 'constant',
        args: Optional[dict] = None,
        expected: Optional[dict] = None,
        quote: str = 'a verbatim quote',
    ) -> ClaimRecord:
        return ClaimRecord.from_dict({
            'id': claim_id,
            'citation': {'source': 'test', 'quote': quote},
            'plan': {'op': op, 'args': {'value': 1} if args is None else args},
            'expected': {'equals': 1} if expected is None else expected,
            'computational': op != 'constant',
        })

    def random_matrix(self, size: int, bound: int = 5) -> MatQ:
        return MatQ(self.rng.integers(-bound, bound + 1, size=(size, size)).tolist())

    def fraction(self, numerator: int, denominator: int = 1) -> Fraction:
        return Fraction(numerator, denominator)
