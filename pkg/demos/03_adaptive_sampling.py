"""Adaptive sampling: store a frame only when the mask has changed enough.

The deform scenario grows and shrinks a square in place. The variation rate
is 1 - IoU between the new predicted mask and the mask of the last stored
frame; a frame is stored when it exceeds sigma. Larger sigma, fewer stores.
"""

# %%
from remn.config import PipelineConfig, ScenarioSpec
from remn.pipeline import segment_video
from remn.synthetic import generate_synthetic_video

frames, masks = generate_synthetic_video(ScenarioSpec("deform", frames=150, size=(256, 256), seed=0))
areas = [int(m.sum()) for m in masks]
print("object area ranges from", min(areas), "to", max(areas), "pixels")

# %%
for sigma in (0.05, 0.1, 0.2, 0.4):
    cfg = PipelineConfig().replace(asm__sigma=sigma, rrm__enabled=False)
    out = segment_video(frames, masks[0], cfg)
    stored = [t for t, r in enumerate(out) if r.stored]
    print(f"sigma {sigma:.2f}: {len(stored):3d} frames stored, first few {stored[:8]}")

# %% A fixed interval of 5 for comparison stores regardless of change
out = segment_video(frames, masks[0], PipelineConfig().replace(asm__enabled=False, rrm__enabled=False))
print("interval 5:", sum(r.stored for r in out), "frames stored")
