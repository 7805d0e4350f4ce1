"""Shannon-capacity uplink rate between a vehicle and an RSU."""
from __future__ import annotations

import math

from .scenario import ChannelParams, RsuNode, VehicleNode

__all__ = ["data_rate"]


def data_rate(channel: ChannelParams, vehicle: VehicleNode, rsu: RsuNode) -> float:
    """Uplink rate in bits/s.

    ``B * log2(1 + P*G / (N0 + I))``. Path loss is assumed folded into the
    vehicle's antenna gain, so the rate does not depend on distance.
    """
    sinr = vehicle.tx_power_w * vehicle.antenna_gain / (channel.noise_w + rsu.interference_w)
    return channel.bandwidth_hz * math.log2(1.0 + sinr)
