"""Eve's measurement and inference toolkit.

Eve sees the wire triple (s_u, s_i, p_ab) and the public protocol
parameters, never the per-period private draws.  What that buys her
differs sharply by variant:

* classic / vmg: she can classify LL and HH exactly, but the LH and HL
  triples coincide by construction, so secure bits stay hidden;
* rr: she can extract the unordered resistor *values* (Vieta pair) but
  not which party holds which;
* rrrt: she faces four unknowns (R_A, T_A, R_B, T_B) with three
  equations.  :func:`eve_rrrt_solution_family` makes that constructive:
  sweeping an assumed R_A produces a one-parameter family of exactly
  consistent configurations whose implied bit assignments disagree.

Guess accuracy over secure bits, with a Wilson confidence interval, is
the quantitative stand-in for "zero information gain".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Optional

import numpy as np

from .errors import InconsistentObservables, KljnError, ModelMismatch
from .physics import (
    SI,
    BandConfig,
    PartyState,
    PhysicalConstants,
    WireObservables,
    analytic_observables,
)
from .protocol import (
    STATUS_SECURE,
    ProtocolConfig,
    SessionReport,
    run_session,
)
from .resolver import ResistorPair, eve_resistor_pair_equal_temp

STRATEGIES = ("random", "nearest-class", "pair-extraction")


@dataclass(frozen=True)
class EveView:
    """Everything the wire hands to Eve for one bit period.

    Kerckhoffs assumption: the protocol configuration (variant, ranges,
    public sets, bandwidth) is known; the per-period private draws are
    not, and this type carries none of them.
    """

    observables: WireObservables
    bandwidth_hz: float
    public_config: Optional[ProtocolConfig] = None


@dataclass(frozen=True)
class SolutionFamilyPoint:
    """One member of Eve's consistent-configuration family."""

    assumed_r_a: float
    implied_t_a: float
    implied_alpha: float
    implied_beta: float
    residual: float

    def implied_alice_bit(self) -> Optional[str]:
        """Alice's bit if this family member were the truth; None at a tie."""
        if self.implied_alpha == 1.0:
            return None
        return "L" if self.implied_alpha > 1.0 else "H"


@dataclass
class GuessRecord:
    """Eve's per-bit key guesses over the secure bits of a session."""

    strategy: str
    bit_indices: list[int] = field(default_factory=list)
    guesses: list[int] = field(default_factory=list)
    truths: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.guesses)

    @property
    def n_correct(self) -> int:
        return sum(g == t for g, t in zip(self.guesses, self.truths))

    @property
    def accuracy(self) -> Optional[float]:
        return self.n_correct / self.n if self.n else None

    def wilson_interval(self, confidence: float = 0.99) -> Optional[tuple[float, float]]:
        if not self.n:
            return None
        return wilson_interval(self.n_correct, self.n, confidence)


def wilson_interval(successes: int, n: int, confidence: float = 0.99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= successes <= n:
        raise ValueError(f"successes {successes} outside [0, {n}]")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    p_hat = successes / n
    denom = 1.0 + z * z / n
    center = (p_hat + z * z / (2 * n)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _triple_distance(a: WireObservables, b: WireObservables) -> float:
    total = 0.0
    for x, y in ((a.s_u, b.s_u), (a.s_i, b.s_i), (a.p_ab, b.p_ab)):
        scale = max(abs(x), abs(y), 1e-300)
        total += ((x - y) / scale) ** 2
    return total


def _nearest_class(view: EveView, classes: dict[str, WireObservables]) -> str:
    return min(classes, key=lambda name: _triple_distance(view.observables,
                                                          classes[name]))


def _binary_classes(config: ProtocolConfig) -> dict[str, WireObservables]:
    """Analytic class centers {LL, HH, LH-or-HL} for a binary variant.

    LH and HL coincide (exactly for classic, by temperature design for
    the four-resistor scheme), so they form a single irreducible class.
    """
    if config.variant == "classic-kljn":
        low = PartyState(config.r_low, config.t_eff)
        high = PartyState(config.r_high, config.t_eff)
        pairs = {"LL": (low, low), "HH": (high, high), "LH-or-HL": (low, high)}
    else:
        r_al, r_ah, r_bl, r_bh = config.vmg_resistors
        temps = config.vmg_temperatures()
        pairs = {
            "LL": (PartyState(r_al, config.t_eff), PartyState(r_bl, temps.t_bl)),
            "HH": (PartyState(r_ah, temps.t_ah), PartyState(r_bh, temps.t_bh)),
            "LH-or-HL": (PartyState(r_al, config.t_eff), PartyState(r_bh, temps.t_bh)),
        }
    return {name: analytic_observables(a, b, config.band, config.constants)
            for name, (a, b) in pairs.items()}


def eve_classic_distinguish(view: EveView, r_low: float, r_high: float,
                            t_eff: float,
                            constants: PhysicalConstants = SI) -> str:
    """Classify a binary equal-temperature draw as LL, HH or LH-or-HL.

    The LH/HL pair is irreducibly ambiguous: both produce the same wire
    triple, which is exactly what makes those bits secure.
    """
    band = _band_for(view)
    low = PartyState(r_low, t_eff)
    high = PartyState(r_high, t_eff)
    classes = {
        "LL": analytic_observables(low, low, band, constants),
        "HH": analytic_observables(high, high, band, constants),
        "LH-or-HL": analytic_observables(low, high, band, constants),
    }
    return _nearest_class(view, classes)


def _band_for(view: EveView):
    if view.public_config is not None:
        return view.public_config.band
    return BandConfig(bandwidth_hz=view.bandwidth_hz,
                      sample_rate_hz=2.0 * view.bandwidth_hz, samples_per_bit=2)


def eve_pair_extraction(view: EveView, t_eff: float,
                        constants: PhysicalConstants = SI,
                        mismatch_tolerance: float = 1e-6) -> ResistorPair:
    """Extract the unordered resistor pair under the equal-temperature model.

    Real leak for the equal-temperature variants: the two resistance
    values are recoverable from (s_u, s_i), though their locations are
    not.  The model is checked before use: a non-zero normalized power
    flow betrays unequal temperatures and raises ModelMismatch, which is
    exactly why the pair leak disappears in the random-temperature
    scheme.
    """
    obs = view.observables
    power_scale = 4.0 * constants.k * t_eff * view.bandwidth_hz
    normalized_power = abs(obs.p_ab) / power_scale
    if normalized_power > mismatch_tolerance:
        raise ModelMismatch(
            f"normalized power flow {normalized_power} is inconsistent with "
            f"the equal-temperature model (tolerance {mismatch_tolerance})")
    return eve_resistor_pair_equal_temp(obs.s_u, obs.s_i, t_eff, constants)


def eve_rrrt_solution_family(view: EveView, assumed_r_a_grid,
                             tolerance: float,
                             constants: PhysicalConstants = SI) -> list[SolutionFamilyPoint]:
    """Sweep assumed Alice resistances and solve for the rest.

    For each assumed R_A, eliminating the two temperatures from the
    three observable equations leaves a relation linear in R_B:

        s_u = R_A R_B s_i + (p_ab / df) (R_A - R_B)

    so R_B = (s_u - R_A p/df) / (R_A s_i - p/df); the current-PSD and
    power equations then give (T_A, T_B) linearly.  Every assumption
    with positive solutions is an exactly consistent configuration:
    three equations cannot pin four unknowns.  Family points whose
    back-substitution residual exceeds `tolerance` or whose implied
    parameters are unphysical are dropped.
    """
    obs = view.observables
    if not (obs.s_u > 0 and obs.s_i > 0):
        raise InconsistentObservables("spectra must be positive for a family sweep")
    k = constants.k
    df = view.bandwidth_hz
    p_per_hz = obs.p_ab / df
    family: list[SolutionFamilyPoint] = []
    for assumed_r_a in assumed_r_a_grid:
        if assumed_r_a <= 0:
            continue
        denom = assumed_r_a * obs.s_i - p_per_hz
        if denom <= 0.0:
            continue
        r_b = (obs.s_u - assumed_r_a * p_per_hz) / denom
        if r_b <= 0.0:
            continue
        total = assumed_r_a + r_b
        # s_i:  T_A R_A + T_B R_B          = s_i (R_A+R_B)^2 / 4k
        # p:    R_A R_B (T_B - T_A)        = p (R_A+R_B)^2 / 4k df
        m = obs.s_i * total ** 2 / (4.0 * k)
        n = obs.p_ab * total ** 2 / (4.0 * k * df)
        t_a = (m - n / assumed_r_a) / total
        t_b = t_a + n / (assumed_r_a * r_b)
        if t_a <= 0.0 or t_b <= 0.0:
            continue
        alice = PartyState(assumed_r_a, t_a)
        bob = PartyState(r_b, t_b)
        band = BandConfig(bandwidth_hz=df, sample_rate_hz=2.0 * df, samples_per_bit=2)
        predicted = analytic_observables(alice, bob, band, constants)
        residual = math.sqrt(_triple_distance(predicted, obs))
        if residual <= tolerance:
            family.append(SolutionFamilyPoint(
                assumed_r_a=float(assumed_r_a), implied_t_a=float(t_a),
                implied_alpha=float(r_b / assumed_r_a),
                implied_beta=float(t_b / t_a), residual=float(residual)))
    if not family:
        raise InconsistentObservables(
            "no consistent configuration exists for these observables; "
            "they cannot have come from a valid two-resistor loop")
    return family


def default_assumed_grid(config: ProtocolConfig, points: int = 10) -> np.ndarray:
    """Assumed-R_A sweep grid spanning the public resistance range."""
    lo, hi = config.r_range
    return np.geomspace(lo, hi, points)


def _guess_nearest_class(config: ProtocolConfig, view: EveView,
                         rng: np.random.Generator) -> int:
    if config.variant in ("classic-kljn", "vmg-kljn"):
        label = _nearest_class(view, _binary_classes(config))
        if label == "LL":
            return 0
        if label == "HH":
            return 1
        return int(rng.integers(2))  # degenerate class: coin flip
    # quasi-continuum: no finite class set distinguishes secure draws
    return int(rng.integers(2))


def _guess_pair_extraction(config: ProtocolConfig, view: EveView,
                           rng: np.random.Generator) -> int:
    """Wrong-but-deterministic rule: assume the larger extracted
    resistor sits at Alice, i.e. Alice holds H, so the shared (Bob) bit
    is 0.  Symmetric draws make this a coin in disguise."""
    if config.t_eff is not None:
        assumed_t = config.t_eff
    else:
        assumed_t = 0.5 * (config.t_range[0] + config.t_range[1])
    try:
        pair = eve_pair_extraction(view, assumed_t, config.constants,
                                   mismatch_tolerance=math.inf)
    except KljnError:
        return int(rng.integers(2))
    if pair.degenerate:
        return int(rng.integers(2))
    # decide Alice=high vs Alice=low from the power sign she cannot use
    # meaningfully: positive p_ab "suggests" Bob hotter, tells nothing
    # about resistance; fall back to the fixed Alice=high rule.
    return 0


def eve_guess_session(config: ProtocolConfig, strategy: str,
                      report: Optional[SessionReport] = None) -> GuessRecord:
    """Replay a session from Eve's view and score her key guesses.

    Only the wire observables and public configuration feed the
    strategy; scoring uses the true shared bits of the secure outcomes.
    Pass `report` to reuse an already-run session.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if report is None:
        report = run_session(config)
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.master_seed, spawn_key=(0xEE,)))
    record = GuessRecord(strategy=strategy)
    for outcome in report.outcomes:
        if outcome.status != STATUS_SECURE:
            continue
        view = EveView(observables=outcome.observables,
                       bandwidth_hz=config.band.bandwidth_hz,
                       public_config=config)
        if strategy == "random":
            guess = int(rng.integers(2))
        elif strategy == "nearest-class":
            guess = _guess_nearest_class(config, view, rng)
        else:
            guess = _guess_pair_extraction(config, view, rng)
        record.bit_indices.append(outcome.index)
        record.guesses.append(guess)
        record.truths.append(outcome.shared_key_bit)
    return record
