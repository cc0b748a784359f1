"""Exception hierarchy.

The CLI maps these onto exit codes: structural problems exit 1, domain
violations exit 2, internal invariant failures exit 3.
"""


class JetError(Exception):
    exit_code = 1


class StructuralError(JetError, ValueError):
    """Malformed input: wrong dimension, order, valence or symmetry."""

    exit_code = 1


class DomainError(JetError, ValueError):
    """Well-formed input outside the domain of an operation."""

    exit_code = 2


class BackendIncompleteError(DomainError):
    """The local star-product backend cannot produce the requested order."""


class InvariantViolation(JetError, RuntimeError):
    """A guaranteed property failed to hold (uniqueness, certification).

    Always a bug: the normalizing linear systems have unique solutions.
    """

    exit_code = 3
