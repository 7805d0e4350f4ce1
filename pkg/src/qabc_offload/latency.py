"""Per-task completion time on the local, edge, and cloud tiers.

Edge and cloud times include a queue term read from a :class:`QueueState`
that the caller owns for one evaluation pass. In ``load_aware`` mode the
queue term is the compute time already booked on that server; in
``constant`` mode it is a fixed configured value.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .radio import data_rate
from .scenario import ChannelParams, CloudNode, RsuNode, TaskSpec, VehicleNode

__all__ = [
    "QUEUE_MODES",
    "QueueState",
    "UnreachableTierError",
    "local_time",
    "edge_time",
    "cloud_time",
]

QUEUE_MODES = ("load_aware", "constant")


class UnreachableTierError(ArithmeticError):
    """Input data cannot be uploaded because the link rate is zero."""


@dataclass
class QueueState:
    """Busy time and booked cycles per RSU (keyed by id) and for the cloud."""

    mode: str = "load_aware"
    q_edge_s: float = 0.0
    q_cloud_s: float = 0.0
    edge_busy_s: dict[int, float] = field(default_factory=dict)
    edge_cycles: dict[int, float] = field(default_factory=dict)
    cloud_busy_s: float = 0.0
    cloud_cycles: float = 0.0

    def __post_init__(self):
        if self.mode not in QUEUE_MODES:
            raise ValueError(f"queue mode must be one of {QUEUE_MODES}, got {self.mode!r}")
        if self.q_edge_s < 0 or self.q_cloud_s < 0:
            raise ValueError("constant queue times must be >= 0")

    def edge_wait(self, rsu_id: int) -> float:
        if self.mode == "constant":
            return self.q_edge_s
        return self.edge_busy_s.get(rsu_id, 0.0)

    def cloud_wait(self) -> float:
        if self.mode == "constant":
            return self.q_cloud_s
        return self.cloud_busy_s

    def book_edge(self, rsu_id: int, busy_s: float, cycles: float) -> None:
        self.edge_busy_s[rsu_id] = self.edge_busy_s.get(rsu_id, 0.0) + busy_s
        self.edge_cycles[rsu_id] = self.edge_cycles.get(rsu_id, 0.0) + cycles

    def book_cloud(self, busy_s: float, cycles: float) -> None:
        self.cloud_busy_s += busy_s
        self.cloud_cycles += cycles


def local_time(task: TaskSpec, vehicle: VehicleNode) -> float:
    return task.cycles / vehicle.cpu_hz


def _upload_time(bits: float, rate: float) -> float:
    if bits == 0:
        return 0.0
    if rate <= 0:
        raise UnreachableTierError(f"cannot upload {bits} bits over a zero-rate link")
    return bits / rate


def edge_time(task: TaskSpec, vehicle: VehicleNode, rsu: RsuNode,
              channel: ChannelParams, queue: QueueState) -> float:
    """Upload + MEC compute + current queue wait; books the compute on ``rsu``."""
    upload = _upload_time(task.input_bits, data_rate(channel, vehicle, rsu))
    compute = task.cycles / rsu.mec_hz
    total = upload + compute + queue.edge_wait(rsu.id)
    queue.book_edge(rsu.id, compute, task.cycles)
    return total


def cloud_time(task: TaskSpec, vehicle: VehicleNode, rsu: RsuNode, cloud: CloudNode,
               channel: ChannelParams, queue: QueueState) -> float:
    """Upload to RSU + backhaul + cloud compute + propagation + queue wait."""
    upload = _upload_time(task.input_bits, data_rate(channel, vehicle, rsu))
    backhaul = task.input_bits / rsu.backhaul_bps
    compute = task.cycles / cloud.cpu_hz
    total = upload + backhaul + compute + cloud.prop_delay_s + queue.cloud_wait()
    queue.book_cloud(compute, task.cycles)
    return total
