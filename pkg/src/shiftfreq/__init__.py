"""Block frequencies, invariant spectra and non-normal digit streams on subshifts."""

from .beta import BetaSystem, beta_shift, cylinder_interval, greedy_expansion, parry_admissible, quasi_greedy_of_one, sft_approximation, symbolic_to_point
from .constructor import (
    PropertyPSchedule,
    TargetPlan,
    WindowRule,
    append_and_certify,
    build_checkpointed_word,
    build_property_p_stream,
    cesaro_inheritance_check,
    odot_concat,
    odot_power,
    phi_tower,
    realize_frequency_word,
    repetition_bound,
)
from .errors import (
    InfeasibleTarget,
    InputError,
    NotConnectable,
    NotIrreducible,
    PaperBoundViolation,
    PrecisionError,
    ResourceError,
    ShiftError,
)
from .freqstats import FITTED, PAPER_N, CesaroTower, FrequencyVector, block_frequency, cesaro_trajectory, detect_accumulation, frequency_vector, l1_distance, vector
from .shiftspace import ShiftSpec, connect, enumerate_language, find_padding, full_shift, golden_mean_shift, is_allowed, sft, specification_constant
from .spectrum import entropy, enumerate_rational_targets, invariant_polytope, is_in_spectrum, parry_measure, polytope_vertices, theorem1_hypothesis
from .stream import DigitStream
