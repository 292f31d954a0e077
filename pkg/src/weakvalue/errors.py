"""Exception hierarchy.

``ValidationError`` covers malformed inputs (bad shapes, mismatched bases,
out-of-range parameters).  ``PhysicsError`` covers inputs that are well formed
but describe an event of probability zero or an undefined quantity.
"""


class ValidationError(ValueError):
    pass


class StructuralError(ValidationError):
    """Dimension or basis-label mismatch between states/operators."""


class RangeError(ValidationError):
    """Parameter outside its admissible interval."""


class PhysicsError(ArithmeticError):
    pass


class NullStateError(PhysicsError):
    """A zero vector was asked to be normalized."""


class UndefinedWeakValueError(PhysicsError):
    """Pre- and post-selected states are orthogonal."""


class UndefinedABLError(PhysicsError):
    pass


class PostselectionError(PhysicsError):
    """Postselection annihilates the state."""


class UndefinedReadoutError(PhysicsError):
    """Normalized readout requested at zero measurement strength."""
