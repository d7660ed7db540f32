"""Rigid-block simulator: model assembly, excitation, time stepping, sensors."""

from .builder import BlockSpec, build_block_model
from .excitation import (
    ExcitationProgram,
    ForcePoint,
    SteppedSpec,
    SweepSpec,
    dump_program,
    force_timeseries,
    load_program,
)
from .integrate import StateHistory, integrate
from .model import (
    Mode,
    RigidBlockModel,
    SpringElement,
    SystemMatrices,
    assemble_system,
    dump_model,
    load_model,
    modal_properties,
    steady_state_response,
)
from .sensors import NoiseSpec, channel_label, sensor_kinematics

__all__ = [
    "BlockSpec",
    "ExcitationProgram",
    "ForcePoint",
    "Mode",
    "NoiseSpec",
    "RigidBlockModel",
    "SpringElement",
    "StateHistory",
    "SteppedSpec",
    "SweepSpec",
    "SystemMatrices",
    "assemble_system",
    "build_block_model",
    "channel_label",
    "dump_model",
    "dump_program",
    "force_timeseries",
    "integrate",
    "load_model",
    "load_program",
    "modal_properties",
    "sensor_kinematics",
    "steady_state_response",
]
