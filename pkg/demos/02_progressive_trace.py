"""
Progressive sampling, stage by stage
====================================

Replays the 15-frequency example with one new equation per node and stage
and prints which nodes resolve where.
"""

# %%
import numpy as np

from structdft import ProgressiveConfig, SupportSet, extract_merging_trees, progressive_sdft
from structdft import synthesize_signal

support = SupportSet((1, 3, 4, 5, 6, 7, 19, 21, 23, 32, 40, 48, 56, 70, 82), 1024)
f = synthesize_signal(support, rng=np.random.default_rng(0))
coeffs, report = progressive_sdft(f, support, ProgressiveConfig(eta=1))

# %%
for stage in report.stages:
    print(f"level {stage['level']}  ({stage['n_ffts']} FFT of size {stage['fft_size']})")
    for node in stage["nodes"]:
        print(f"   {str(node['label']):>22}  case {node['case']}  {node['status']}")

# %% [markdown]
# The only non-trivial merge joins the two leaves {40, 56} and {32, 48},
# climbing two levels before it has as many equations as unknowns.

# %%
for tree in extract_merging_trees(report):
    if tree.weight > 2:
        print(tree.root, tree.members, "height", tree.height, "weight", tree.weight)
print(np.round(report.systems[(2, 0)].matrix, 3))
