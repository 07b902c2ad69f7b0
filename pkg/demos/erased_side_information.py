#!/usr/bin/env python3

# When the decoder's copy of the state survives only with probability pe,
# the optimal rate is the pe-weighted mixture of the plain curve and the
# no-side-information floor H2(p). This sweeps pe and shows the mixture,
# plus the two degenerate ends.

import numpy as np

from actrate.binary import (
    rate_causal_binary,
    rate_erased_causal,
    rate_erased_noncausal,
    rate_noncausal_binary,
)
from actrate.kernel import binary_entropy

P = 0.1
B = 0.2

floor = binary_entropy(P)
plain_nc = rate_noncausal_binary(B, P)
plain_ca = rate_causal_binary(B, P)

print(f"budget B = {B}, plain curves: foresight {plain_nc:.6f}, committed {plain_ca:.6f}")
print(f"no-side-information floor H2({P}) = {floor:.6f}")
print()
print(f"{'pe':>5}  {'erased (foresight)':>18}  {'mixture check':>14}")
for pe in np.arange(0.0, 1.0001, 0.125):
    pe = float(pe)
    erased = rate_erased_noncausal(B, P, pe)
    mixture = pe * plain_nc + (1.0 - pe) * floor
    print(f"{pe:5.3f}  {erased:18.6f}  {abs(erased - mixture):14.2e}")

# pe = 1 keeps the state at the decoder, pe = 0 erases it entirely
assert rate_erased_noncausal(B, P, 1.0) == plain_nc
assert rate_erased_causal(B, P, 1.0) == plain_ca
assert rate_erased_noncausal(B, P, 0.0) == floor
print()
print("pe = 1 reduces to the plain curve, pe = 0 to the floor (exact).")
