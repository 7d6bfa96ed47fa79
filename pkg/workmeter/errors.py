# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
Error types raised across the package.
"""


class WorkMeterError(Exception):
    '''Base for all ``workmeter`` errors'''


class DimensionError(WorkMeterError, ValueError):
    '''Operand shapes or subsystem dimensions do not fit together'''


class NotHermitianError(WorkMeterError, ValueError):
    '''An operator required to be hermitian is not'''


class NotUnitaryError(WorkMeterError, ValueError):
    '''A propagator required to be unitary is not'''


class IllConditionedError(WorkMeterError, ArithmeticError):
    '''A matrix logarithm hit eigenvalues below the clamp threshold'''


class TruncationLeakError(WorkMeterError):
    '''Population leaked into the top of a truncated Fock space'''


class ProtocolError(WorkMeterError, ValueError):
    '''A control protocol or discretization is invalid'''


class BoundViolationError(WorkMeterError):
    """The chain ``dF <= dF~ <= <W>`` was violated beyond tolerance.

    This is a correctness failure and is never expected in practice.
    """


class UsageError(WorkMeterError):
    '''Invalid command line usage'''
