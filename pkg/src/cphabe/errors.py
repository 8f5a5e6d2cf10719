"""Exception hierarchy.

Every error carries a short ``code`` so serialized reports and the CLI can
tell failure classes apart. ``ValidationError`` subclasses map to CLI exit
code 2, ``ContractError`` subclasses to exit code 3.
"""


class HabeError(Exception):
    code = "E_HABE"


class ValidationError(HabeError, ValueError):
    code = "E_VALIDATION"


class ModulusMismatch(ValidationError):
    code = "E_MODULUS"


class NotInvertible(HabeError, ZeroDivisionError):
    code = "E_NOT_INVERTIBLE"


class PointValidationError(ValidationError):
    """Point is off the curve or outside the order-q subgroup."""

    code = "E_POINT"


class ParameterError(ValidationError):
    code = "E_PARAMS"


class PolicySyntaxError(ValidationError):
    code = "E_POLICY_SYNTAX"

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownAttribute(ValidationError):
    code = "E_UNKNOWN_ATTRIBUTE"


class MultiDomainClause(ValidationError):
    code = "E_MULTI_DOMAIN_CLAUSE"


class DuplicateAttribute(ValidationError):
    code = "E_DUPLICATE_ATTRIBUTE"


class RegistryError(ValidationError):
    code = "E_REGISTRY"


class MalformedDocument(ValidationError):
    code = "E_PARSE"


class VersionMismatch(ValidationError):
    code = "E_VERSION"


class ContractError(HabeError):
    code = "E_CONTRACT"


class NotAuthorized(ContractError):
    code = "E_NOT_AUTHORIZED"


class IssuanceRefused(ContractError):
    code = "E_REFUSED"


class ForeignAttribute(ContractError):
    code = "E_FOREIGN_ATTRIBUTE"


class MixedDomainKeys(ContractError):
    code = "E_MIXED_DOMAIN"


class PathMismatch(ContractError):
    code = "E_PATH"


class OracleCollision(ContractError):
    code = "E_ORACLE_COLLISION"
