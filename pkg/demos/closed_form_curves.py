#!/usr/bin/env python3
"""Print the two closed-form rate-cost curves for the binary instance.

The encoder describes its action-modified source to a decoder; spending
action budget B buys correlation with the state and lowers the rate. The
curve with state foresight is a tangent line up to the kink b*, then the
curved branch 1 - H2(B) + H2(p); without foresight time sharing gives a
straight line down to H2(p) at B = 1/2.
"""

import numpy as np

from actrate.binary import bstar, rate_causal_binary, rate_noncausal_binary
from actrate.kernel import binary_entropy

P = 0.1
BUDGETS = np.arange(0.0, 0.5001, 0.025)

kink = bstar(P)
print(f"noise p = {P}, H2(p) = {binary_entropy(P):.6f}, kink b* = {kink:.6f}")
print()
print(f"{'B':>6}  {'R_foresight':>12}  {'R_committed':>12}  {'gap':>8}")
for b in BUDGETS:
    nc = rate_noncausal_binary(float(b), P)
    ca = rate_causal_binary(float(b), P)
    marker = "  <- kink passed" if abs(b - kink) <= 0.0125 else ""
    print(f"{b:6.3f}  {nc:12.6f}  {ca:12.6f}  {ca - nc:8.5f}{marker}")

print()
print("both curves start at 1 bit (B = 0: the action is frozen, the source")
print(f"is a fair coin) and meet H2(p) = {binary_entropy(P):.6f} at B = 1/2.")
