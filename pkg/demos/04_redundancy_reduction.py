"""Redundancy reduction: keeping the bank at N entries forever.

When the bank reaches N entries, a small gate looks at the pooled keys and
scores each temporal policy s; the winner merges consecutive windows of
2**(s+1) entries by averaging. The KL drift between pooled channel
distributions before and after is reported as the compression loss.
"""

# %%
import numpy as np

from remn.config import PipelineConfig, ScenarioSpec
from remn.pipeline import Segmenter
from remn.synthetic import generate_synthetic_video

frames, masks = generate_synthetic_video(ScenarioSpec("deform", frames=400, size=(256, 256), seed=1))
# seed 2 draws a gate that uses both policies on this clip
seg = Segmenter(PipelineConfig(seed=2), num_objects=1)
out = [seg.start(frames[0], masks[0])] + [seg.step(f) for f in frames[1:]]

# %%
sizes = [r.bank_size for r in out]
print("bank size: max", max(sizes), "final", sizes[-1])
events = [r.compression for r in out if r.compression is not None]
print(len(events), "compressions")
for e in events[:6]:
    print(f"  frame {e.frame_index:3d}: prob {np.round(e.prob, 3)} -> policy {e.policy}, "
          f"{e.length_before} -> {e.length_after} entries, loss {e.loss:.2e}")

# %% Each merged entry keeps the frame index of the last member of its window
print("final bank frame indices:", [e.frame_index for e in seg.bank.entries])

# %% Averaging equal windows keeps the pooled channel means, so the loss is zero up to rounding
print("largest |loss|:", max(abs(e.loss) for e in events))
