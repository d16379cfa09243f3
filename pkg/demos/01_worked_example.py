"""
Shift and sample on a small support
===================================

An 8-sparse spectrum of length 1024 split into residue classes mod 4.
"""

# %%
import numpy as np

from structdft import SupportSet, build_tree, shift_and_sample, submatrix_method, synthesize_signal
from structdft.core import fft_paper_cost, fft_pow2

support = SupportSet((0, 1, 6, 7, 38, 65, 135, 512), 1024)
f = synthesize_signal(support, rng=np.random.default_rng(7))

# %% [markdown]
# The congruence tree at level 2 has four nodes of two frequencies each.

# %%
tree = build_tree(support, 2)
for level in range(3):
    print(level, [tree[key].label for key in tree.nodes_at_level(level)])

# %% [markdown]
# Two shifted 4-point FFTs feed four 2x2 solves.

# %%
coeffs, report = shift_and_sample(f, support, 2)
print("blocks", report.block_sizes, "FFT sizes", report.fft_sizes)
print("reporting-model ops", report.ops.paper_model, "instrumented", report.ops.total)

_, sub = submatrix_method(f, support)
print("full FFT", fft_paper_cost(1024), "dense 8x8 solve", sub.ops.paper_model)

# %%
full = fft_pow2(f)
print("max deviation from the FFT", max(abs(coeffs[j] - full[j]) for j in support))
