"""Z2 symmetry breaking of multi-level atoms in a two-mode driven cavity.

Submodules:

* ``levels``    Zeeman level schemes, Clebsch-Gordan factors, branching ratios
* ``analytic``  closed-form two-ground-state model and critical laws
* ``meanfield`` mean-field time evolution for arbitrary (F, F')
* ``oracle``    exact master equation for one or two atoms
* ``analysis``  relaxation times, thresholds, exponent fits, steady maps
* ``config`` / ``output`` / ``cli``  run configuration, file formats, command line
"""

__version__ = "0.1.0"

from .levels import LevelScheme, branching_ratios, build_level_scheme, clebsch_gordan
from .analytic import (
    SystemParams,
    critical_coupling,
    derive_two_level,
    imbalance_steady,
    phase_diagram,
    steady_states,
)
from .meanfield import (
    AtomLossModel,
    IntegrationOptions,
    MeanFieldState,
    ProtocolConfig,
    eom_rhs,
    initial_state_line,
    integrate,
    run_protocol,
    sigmoid_atom_number,
)
from .results import Axis, SweepResult, Trajectory
