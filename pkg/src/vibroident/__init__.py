"""Forced-vibration system identification toolkit.

A 6-DOF rigid-block-on-springs simulator produces synthetic stepped and
swept sine test records; the analysis side recovers frequency response
curves, rigid-body motion, natural frequencies and damping ratios from
multi-channel accelerometer data.
"""

__version__ = "0.1.0"
