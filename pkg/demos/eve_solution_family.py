"""Why the random-temperature variant hides the bit: Eve's equations
are underdetermined.

Run:  python3 demos/eve_solution_family.py

Eve measures three numbers (voltage PSD, current PSD, power flow) but
faces four unknowns (both resistances and both temperatures).  Sweeping
an assumed Alice resistance yields a whole family of configurations
that reproduce her measurements *exactly* — and the family straddles
the alpha = 1 line, so both bit assignments remain live.
"""

import numpy as np

from kljn import (
    BandConfig,
    EveView,
    NORMALIZED,
    PartyState,
    analytic_observables,
    eve_rrrt_solution_family,
)

band = BandConfig(bandwidth_hz=1.0, sample_rate_hz=4.0, samples_per_bit=4096)

# the truth Eve never sees: Alice holds the lower resistance (bit L... H
# for Bob), both temperatures private
alice = PartyState(resistance=1_200.0, temperature=250.0)
bob = PartyState(resistance=1_700.0, temperature=380.0)
observables = analytic_observables(alice, bob, band, NORMALIZED)

print(f"wire triple Eve measures: s_u={observables.s_u:.6g}  "
      f"s_i={observables.s_i:.6g}  p_ab={observables.p_ab:.6g}")
print(f"hidden truth: R_A={alice.resistance:.0f} T_A={alice.temperature:.0f}  "
      f"R_B={bob.resistance:.0f} T_B={bob.temperature:.0f}\n")

view = EveView(observables=observables, bandwidth_hz=band.bandwidth_hz)
family = eve_rrrt_solution_family(view, np.geomspace(800.0, 2_500.0, 12),
                                  tolerance=1e-9, constants=NORMALIZED)

print(f"{'assumed R_A':>11}  {'implied T_A':>11}  {'alpha':>7}  "
      f"{'beta':>7}  {'residual':>9}  bit")
for pt in family:
    print(f"{pt.assumed_r_a:>11.1f}  {pt.implied_t_a:>11.1f}  "
          f"{pt.implied_alpha:>7.3f}  {pt.implied_beta:>7.3f}  "
          f"{pt.residual:>9.2e}  {pt.implied_alice_bit()}")

bits = {pt.implied_alice_bit() for pt in family} - {None}
print(f"\nbit assignments present in the family: {sorted(bits)}")
print("every row reproduces the measured triple exactly; "
      "Eve cannot pick one.")
