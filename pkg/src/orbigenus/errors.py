"""Exception hierarchy.

The CLI maps these onto exit codes: schema problems exit 2, model
inconsistencies exit 3, arithmetic preconditions exit 4.
"""


class OrbigenusError(Exception):
    exit_code = 1


class SchemaError(OrbigenusError):
    exit_code = 2


class ModelError(OrbigenusError):
    exit_code = 3


class ModelIncompleteError(ModelError):
    pass


class ArithmeticPreconditionError(OrbigenusError):
    exit_code = 4


class MalformedScalarError(ArithmeticPreconditionError):
    pass


class NotNilpotentError(ArithmeticPreconditionError):
    pass


class ReductionRequiredError(ArithmeticPreconditionError):
    pass


class DomainError(ArithmeticPreconditionError):
    pass


class GradeError(ArithmeticPreconditionError):
    pass
