"""Thermal-noise (KLJN-family) key-exchange simulation and analysis toolkit."""

__version__ = "0.1.0"

from .adversary import (
    EveView,
    GuessRecord,
    SolutionFamilyPoint,
    eve_classic_distinguish,
    eve_guess_session,
    eve_pair_extraction,
    eve_rrrt_solution_family,
    wilson_interval,
)
from .errors import (
    AmbiguousRecovery,
    ConfigError,
    GridTooLarge,
    InadmissibleTemperatures,
    InconsistentObservables,
    KljnError,
    ModelMismatch,
    NoPositiveRoot,
    SingularSystem,
    TieDraw,
    TraceTooShort,
)
from .lookup import LookupTable
from .physics import (
    BOLTZMANN,
    NORMALIZED,
    SI,
    BandConfig,
    LoopParameters,
    NoiseTrace,
    PartyState,
    PhysicalConstants,
    WireObservables,
    analytic_observables,
    estimate_observables,
    synthesize_bit_period,
)
from .protocol import (
    BitOutcome,
    ProtocolConfig,
    SessionReport,
    assign_bits,
    bit_seed,
    build_lookup_table,
    draw_parameters,
    run_bit,
    run_session,
)
from .resolver import (
    RecoveredPartner,
    ReducedObservables,
    ResistorPair,
    VmgTemperatures,
    eve_resistor_pair_equal_temp,
    partner_resistance_equal_temp,
    recover_partner,
    reduce_observables,
    solve_vmg_temperatures,
)
