"""The command-line surface, driven from Python.

Equivalent shell commands:

    remn synth --scenario plain --frames 30 --size 128x128 --out work/gt
    remn run --config work/run.cfg --out work/run
    remn eval --pred work/run/pred --gt work/gt
"""

# %%
import tempfile
from pathlib import Path

from remn.cli import main

work = Path(tempfile.mkdtemp())
main(["synth", "--scenario", "plain", "--frames", "30", "--size", "128x128", "--seed", "0", "--out", str(work / "gt")])

# %% Configs are flat key = value files; unknown keys are rejected
(work / "run.cfg").write_text("""\
seed = 0
asm.sigma = 0.1
rrm.capacity = 8
scenario.name = plain
scenario.frames = 30
scenario.size = 128x128
scenario.seed = 0
""")
main(["run", "--config", str(work / "run.cfg"), "--out", str(work / "run")])
print(sorted(p.name for p in (work / "run").iterdir()))

# %% Scoring the written masks reproduces the report's J and F
main(["eval", "--pred", str(work / "run" / "pred"), "--gt", str(work / "gt")])

# %% Argument errors exit with status 2
(work / "bad.cfg").write_text("rrm.capacity = 6\n")
print("exit status:", main(["run", "--config", str(work / "bad.cfg")]))
