import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import sympy

from fatlab.exceptions import InvalidPatternError, NonFreeActionError
from fatlab.exactnum import CirclePoint
from fatlab.spin import (
    CirclePattern,
    Su2Rep,
    enumerate_free_circles,
    enumerate_sphere6_circles,
    finite_action_free,
    is_free_circle,
    is_spin7_member,
    lift_C_diagonal,
    speed_square_sum,
    su2_table,
)

__all__ = (
    "MODEL_P1",
    "SU2_CORRECTION",
    "QuotientDescriptor",
    "QuotientReport",
    "HomotopyVerdict",
    "p1_circle",
    "p1_family",
    "p1_family_identity",
    "p1_su2",
    "distinct_p1_values",
    "sphere6_p1_values",
    "homotopy_obstruction",
    "quotient_report",
)

logger = logging.getLogger(__name__)

BASE_SPACES = ("S7xS7", "S6xS7")
GROUPS = ("circle", "su2", "finite")

# first Pontryagin classes of the product model spaces, in units of the generator
MODEL_P1 = {"CP3": 4, "S4": 0}

# the torus of SU(2) contributes an extra -4z² to the sum of squares
SU2_CORRECTION = 4

FREE_SU2_PARTITION = (2, 2, 2, 2)


def p1_circle(pattern: CirclePattern, base_space: str = "S7xS7") -> int:
    """Nonnegative representative of p1 of the circle quotient: Σ ℓ_i² + r_i²."""
    if base_space == "S6xS7":
        if pattern.ell[0] != 0 or any(abs(value) != 1 for value in pattern.r):
            raise NonFreeActionError(f"{pattern} does not act freely on S6 × S7")
    elif not is_free_circle(pattern):
        raise NonFreeActionError(f"{pattern} does not act freely on S7 × S7")
    return pattern.square_sum


def p1_family(k: int) -> int:
    """p1 of the quotient by n = (1, 1, 1, k), free when k ≡ 3 mod 6."""
    return p1_circle(CirclePattern((1, 1, 1, k)))


def p1_family_identity() -> bool:
    """Σ ℓ² + r² for n = (1, 1, 1, k) expands to 4(k² + 5) as a polynomial in k."""
    k = sympy.Symbol("k")
    total = speed_square_sum((1, 1, 1, k))
    return sympy.expand(total - 4 * (k ** 2 + 5)) == 0


def p1_su2(base_space: str = "S7xS7") -> int:
    assert base_space in BASE_SPACES, f"Unknown base space {base_space}"
    row = su2_table(FREE_SU2_PARTITION)
    total = sum(int(value) ** 2 for value in row.lift_A + row.lift_B)
    return total - SU2_CORRECTION


def distinct_p1_values(bound: int) -> List[int]:
    return sorted({abs(circle.p1) for circle in enumerate_free_circles(bound)})


@dataclass(frozen=True)
class HomotopyVerdict:
    distinct_homotopy: bool
    distinct_homeo_hint: bool


def homotopy_obstruction(a: int, b: int) -> HomotopyVerdict:
    """p1 mod 24 is a homotopy invariant; |p1| a homeomorphism invariant."""
    return HomotopyVerdict(distinct_homotopy=(a - b) % 24 != 0, distinct_homeo_hint=abs(a) != abs(b))


@dataclass(frozen=True)
class QuotientDescriptor:
    base_space: str
    group: str
    pattern: Optional[Union[CirclePattern, Su2Rep]] = None
    d: Optional[int] = None
    twist: bool = True

    def __post_init__(self) -> None:
        assert self.base_space in BASE_SPACES, f"Unknown base space {self.base_space}"
        assert self.group in GROUPS, f"Unknown group {self.group}"


@dataclass(frozen=True)
class QuotientReport:
    space: str
    group: str
    pattern: Optional[str]
    p1: Optional[int]
    ring_type: Optional[str]
    pi1: str
    verdicts: List[Dict[str, Any]] = field(default_factory=list)
    sign_ambiguous: bool = True
    higher_pontryagin_vanish: bool = True
    orientable: Optional[bool] = None
    synge_obstructed: bool = False

    @property
    def p1_mod24(self) -> Optional[int]:
        return None if self.p1 is None else self.p1 % 24

    def to_dict(self) -> Dict[str, Any]:
        return {
            "space": self.space,
            "group": self.group,
            "pattern": self.pattern,
            "p1": self.p1,
            "p1_mod24": self.p1_mod24,
            "ring_type": self.ring_type,
            "pi1": self.pi1,
            "verdicts": self.verdicts,
            "sign_ambiguous": self.sign_ambiguous,
            "higher_pontryagin_vanish": self.higher_pontryagin_vanish,
            "orientable": self.orientable,
            "synge_obstructed": self.synge_obstructed,
        }


def _sphere_factor(base_space: str) -> str:
    return "S6" if base_space == "S6xS7" else "S7"


def _verdicts(p1: int, model: str, sphere: str) -> List[Dict[str, Any]]:
    verdict = homotopy_obstruction(p1, MODEL_P1[model])
    result = {
        "model": f"{sphere}x{model}",
        "model_p1": MODEL_P1[model],
        "distinct_homotopy": verdict.distinct_homotopy,
        "distinct_homeo_hint": verdict.distinct_homeo_hint,
    }
    if verdict.distinct_homotopy:
        result["verdict"] = f"not homotopy equivalent to {sphere}x{model}"
    else:
        result["verdict"] = "undecided"
    return [result]


def _finite_name(base_space: str, d: int, twist: bool) -> str:
    if not twist:
        return f"({base_space})/Z{d}"
    projective = "RP6" if base_space == "S6xS7" else "RP7"
    letter = "N" if base_space == "S6xS7" else "M"
    if d == 1:
        return f"{projective}xS7"
    if d == 2:
        return f"{projective}xRP7"
    return f"{letter}_{d}, an {projective}-bundle over L_{d}"


def _su2_in_spin7(row: Su2Rep) -> bool:
    half = CirclePoint.from_pythagorean(2, 1)
    return is_spin7_member(lift_C_diagonal(row.torus_weights, half.compose(half), half=half))


def quotient_report(q: QuotientDescriptor) -> QuotientReport:
    sphere = _sphere_factor(q.base_space)
    if q.group == "circle":
        if not isinstance(q.pattern, CirclePattern):
            raise InvalidPatternError("Circle quotients need a circle pattern")
        p1 = p1_circle(q.pattern, q.base_space)
        return QuotientReport(
            space=f"({q.base_space})/S1",
            group="circle",
            pattern=str(q.pattern),
            p1=p1,
            ring_type=f"{sphere}xCP3",
            pi1="0",
            verdicts=_verdicts(p1, "CP3", sphere),
            orientable=True,
        )
    if q.group == "su2":
        row = q.pattern if isinstance(q.pattern, Su2Rep) else su2_table(FREE_SU2_PARTITION)
        if not row.free:
            raise NonFreeActionError(f"SU(2) with partition {row.label} does not act freely")
        if q.base_space == "S6xS7" and not _su2_in_spin7(row):
            raise NonFreeActionError(f"SU(2) with partition {row.label} moves the unit 1 and does not preserve S6")
        p1 = p1_su2(q.base_space)
        return QuotientReport(
            space=f"({q.base_space})/SU2",
            group="su2",
            pattern=row.label,
            p1=p1,
            ring_type=f"{sphere}xS4",
            pi1="0",
            verdicts=_verdicts(p1, "S4", sphere),
            orientable=True,
        )
    if not isinstance(q.pattern, CirclePattern) or q.d is None:
        raise InvalidPatternError("Finite quotients need a circle pattern and an order d")
    sphere6 = q.base_space == "S6xS7"
    if not finite_action_free(q.pattern, q.d, minus_on_first=q.twist, sphere6=sphere6):
        raise NonFreeActionError(f"Z2 × Z{q.d} along {q.pattern} does not act freely on {q.base_space}")
    if q.twist:
        pi1 = "Z2" if q.d == 1 else f"Z2xZ{q.d}"
    else:
        pi1 = "0" if q.d == 1 else f"Z{q.d}"
    # the antipodal map of S6 reverses orientation, Spin(8) elements preserve it
    orientable = not (sphere6 and q.twist)
    return QuotientReport(
        space=_finite_name(q.base_space, q.d, q.twist),
        group="finite",
        pattern=str(q.pattern),
        p1=None,
        ring_type=None,
        pi1=pi1,
        sign_ambiguous=False,
        orientable=orientable,
        synge_obstructed=pi1 != "0",
    )


def sphere6_p1_values() -> List[int]:
    return sorted({p1_circle(pattern, "S6xS7") for pattern in enumerate_sphere6_circles()})
