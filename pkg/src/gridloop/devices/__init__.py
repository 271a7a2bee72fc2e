"""Per-device linearized models and scalar response transfer functions.

Synchronous generators (two-axis machine + exciter + governor),
inverter-interfaced generators (filtered current control + power
tracking + frequency measurement), and static ZIP loads.  Droop and
inertia-emulation feedback stay outside the blocks; each block exposes
the gains for the frequency-regulation layer to close.
"""

from gridloop.devices.blocks import DgBlock, ig_block, load_block, sg_block
from gridloop.devices.params import (
    IgParams,
    LoadSpec,
    SgParams,
    nominal_ig,
    nominal_sg,
    nominal_zip,
)
from gridloop.devices.scalar_tfs import governor_tf, inverter_tf

__all__ = [
    "DgBlock",
    "SgParams",
    "IgParams",
    "LoadSpec",
    "nominal_sg",
    "nominal_ig",
    "nominal_zip",
    "governor_tf",
    "inverter_tf",
    "sg_block",
    "ig_block",
    "load_block",
]
