from typing import TYPE_CHECKING, Dict, Set

if TYPE_CHECKING:
    from fatlab.registry import ClaimResult


class DimensionMismatchError(Exception):
    pass


class NotOnCircleError(Exception):
    pass


class NoExactHalfError(Exception):
    pass


class ZeroVectorError(Exception):
    pass


class NotInSubspaceError(Exception):
    pass


class DependentVectorsError(Exception):
    pass


class NotOrthonormalError(Exception):
    pass


class DegenerateTripleError(Exception):
    pass


class NotSubalgebraError(Exception):
    pass


class PropertyNotDeclaredError(Exception):
    pass


class CertificateRangeError(Exception):
    pass


class TrialityError(Exception):
    pass


class TableTranscriptionError(Exception):
    pass


class InvalidPartitionError(Exception):
    pass


class InvalidPatternError(Exception):
    pass


class NonFreeActionError(Exception):
    pass


class InvalidOrderError(Exception):
    pass


class PresetNotFoundError(Exception):
    pass


class UnknownClaimError(Exception):
    pass


class InvalidPresetError(Exception):
    pass


class InvalidPlanError(Exception):
    pass


class ClaimError(Exception):

    def __init__(self, message: str, failed_claims: Set['ClaimResult']) -> None:
        self.message = message
        self.failed_claims = failed_claims

    def __str__(self):
        return f'{self.message}: {sorted(claim.id for claim in self.failed_claims)}'


class ClaimFailureError(ClaimError):

    def __init__(self, failed_claims: Set['ClaimResult']) -> None:
        message = "Claims were executed but following claims did not reproduce the expected outcome"
        super().__init__(message, failed_claims)


class ClaimExecutionError(Exception):

    def __init__(self, failed_claims_dict: Dict[str, Exception]) -> None:
        self.message = "Following claims raised error during execution"
        self.failed_claims_dict = failed_claims_dict

    def __str__(self):
        return f'{self.message}: {self.failed_claims_dict}'
