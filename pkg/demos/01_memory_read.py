"""Memory read: how a query pixel pulls values out of the bank.

Two stored frames, a 2 x 2 grid, 2 key channels. Each query pixel gets a
softmax over all 8 memory pixels of their negative squared distance, then
averages the memory values with those weights.
"""

# %%
import numpy as np

from remn.memory import MemoryBank, compute_affinity, readout

rng = np.random.default_rng(0)
bank = MemoryBank()
for t in range(2):
    key = rng.normal(0, 3, (2, 2, 2))
    value = np.full((2, 2, 1), float(t))       # frame 0 says 0, frame 1 says 1
    bank.insert(key, [value], None, t)

# %% A query that is an exact copy of frame 1 leans on frame 1's pixels
query = bank.entries[1].key
aff = compute_affinity(bank, query)
print("affinity (rows: 8 memory pixels, columns: 4 query pixels)")
print(np.round(aff, 3))
print("column sums:", aff.sum(axis=0))

# %% The readout is therefore close to frame 1's value of 1
print("readout:", np.round(readout(aff, bank, 0)[..., 0], 3))

# %% Moving every key by the same vector changes nothing: only distances matter
shift = np.array([5.0, -3.0])
moved = compute_affinity(bank.keys() + shift, query + shift)
print("max change after a common shift:", np.abs(moved - aff).max())
