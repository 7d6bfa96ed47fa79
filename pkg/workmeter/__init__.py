# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
"""
workmeter: Work as an externally measured observable on a quantum control
           device, with the fluctuation relations it gives rise to.
"""
import logging

from .errors import (
    WorkMeterError, DimensionError, NotHermitianError, NotUnitaryError,
    IllConditionedError, TruncationLeakError, ProtocolError,
    BoundViolationError, UsageError,
)
from .quantum import TOL
from .collision import (
    JointHamiltonian, ControlProtocol, QubitProtocol, relative_hamiltonian,
    effective_unitary, evolve,
)
from .meter import measure_work, sample_work, work_observable
from .fluctuation import (
    tpm_distribution, jarzynski_average, modified_je, best_guess_state,
)


__package__ = 'workmeter'
__version__ = '0.1.0'
__all__ = [
    'TOL', 'JointHamiltonian', 'ControlProtocol', 'QubitProtocol',
    'relative_hamiltonian', 'effective_unitary', 'evolve', 'measure_work',
    'sample_work', 'work_observable', 'tpm_distribution',
    'jarzynski_average', 'modified_je', 'best_guess_state',
    'WorkMeterError', 'DimensionError', 'NotHermitianError',
    'NotUnitaryError', 'IllConditionedError', 'TruncationLeakError',
    'ProtocolError', 'BoundViolationError', 'UsageError',
]


log = logging.getLogger('workmeter')
