"""Monte Carlo simulation of unit-noise processes with bounded drift.

Submodules: controls (drift rules), paths (engines and batches), io
(SDL1 binary / CSV serialization), lamperti (diffusion-to-unit-noise
space transforms).
"""

from .controls import (
    BangBangControl,
    ConstantControl,
    Control,
    MarkovControl,
    RunningMaxControl,
    builtin_controls,
    make_control,
)
from .io import (
    batch_to_bytes,
    read_csv,
    read_samples,
    read_sdl1,
    write_csv,
    write_samples_csv,
    write_sdl1,
)
from .lamperti import (
    DiffusionSpec,
    density_pushforward,
    lamperti_forward,
    lamperti_inverse,
    transformed_drift,
)
from .paths import (
    PathBatch,
    SamplePath,
    TerminalSample,
    normal_increments,
    scale_transform,
    simulate,
    simulate_diffusion,
    simulate_terminal,
)

__all__ = [
    "Control",
    "ConstantControl",
    "BangBangControl",
    "RunningMaxControl",
    "MarkovControl",
    "builtin_controls",
    "make_control",
    "SamplePath",
    "PathBatch",
    "TerminalSample",
    "normal_increments",
    "simulate",
    "simulate_terminal",
    "simulate_diffusion",
    "scale_transform",
    "DiffusionSpec",
    "lamperti_forward",
    "lamperti_inverse",
    "transformed_drift",
    "density_pushforward",
    "write_sdl1",
    "read_sdl1",
    "write_csv",
    "read_csv",
    "read_samples",
    "write_samples_csv",
    "batch_to_bytes",
]
