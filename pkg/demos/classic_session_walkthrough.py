"""Walk through one classic two-resistor session, bit by bit.

Run:  python3 demos/classic_session_walkthrough.py

Both parties pick randomly from a public pair {r_low, r_high} at a
common temperature.  When their picks differ, the wire observables are
identical for LH and HL (that is the security), so Eve learns nothing;
when they match, she classifies the draw exactly and the bit is thrown
away.  Expect roughly half the bits to survive.
"""

from kljn import (
    BandConfig,
    NORMALIZED,
    ProtocolConfig,
    eve_guess_session,
    run_session,
)

config = ProtocolConfig(
    variant="classic-kljn",
    band=BandConfig(bandwidth_hz=1.0, sample_rate_hz=4.0, samples_per_bit=4096),
    bits=20,
    master_seed=2024,
    r_low=1_000.0,
    r_high=2_000.0,
    t_eff=300.0,
    constants=NORMALIZED,
)

report = run_session(config)
guesses = eve_guess_session(config, "nearest-class", report)
guess_by_index = dict(zip(guesses.bit_indices, guesses.guesses))

print(f"{'bit':>3}  {'alice':>6}  {'bob':>6}  {'status':<26} key  eve")
for o in report.outcomes:
    key = "-" if o.shared_key_bit is None else o.shared_key_bit
    eve = guess_by_index.get(o.index, "-")
    print(f"{o.index:>3}  {o.alice_draw.resistance:>6.0f}  "
          f"{o.bob_draw.resistance:>6.0f}  {o.status:<26} {key:>3}  {eve:>3}")

print()
print(f"efficiency: {report.efficiency:.2f}  (expect ~0.5)")
print(f"eve accuracy on secure bits: {guesses.accuracy:.2f}  (expect ~0.5)")
print(f"shared key: {''.join(str(b) for b in report.key_bits)}")
