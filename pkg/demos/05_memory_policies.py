"""Memory policies on a long video: accuracy, bank size and latency.

The long scenario replays a looping clip. Under the unbounded policy every
5th frame is stored and per-frame latency grows with the bank; the dynamic
policy keeps the bank at 8 entries, so latency stays flat.

The bound is not free. On this clip the compressed bank scores lower J&F
than the unbounded one, since averaging blurs the stored masks. With only
100 frames per clip the latency windows are short and the dynamic ratio is
noisy; the acceptance run uses 200 frames.
"""

# %%
import numpy as np

from remn.benchmark import run_benchmark
from remn.config import PipelineConfig, ScenarioSpec

F = 100
cfg = PipelineConfig()
for policy in ("dynamic", "unbounded", "interval:10"):
    once = run_benchmark(ScenarioSpec("long", frames=F, size=(256, 256), replay_factor=1), cfg, policy)
    thrice = run_benchmark(ScenarioSpec("long", frames=F, size=(256, 256), replay_factor=3), cfg, policy)
    ratio = np.median(thrice.per_frame_latency[-F // 2:]) / np.median(once.per_frame_latency[F // 2:])
    print(f"{policy:12s} J&F {thrice.jf_mean:.3f}  peak bank {thrice.peak_bank:3d}  "
          f"FPS {thrice.fps:6.1f}  late/early latency {ratio:.2f}")
