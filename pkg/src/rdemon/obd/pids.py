"""Mode-01 OBD-II PID decoding (and encoding, for the simulator).

Each table entry decodes its payload into one or more named channels as
``raw * scale + offset`` over a big-endian byte slice.  A sensor profile
may override scale/offset per PID (manufacturers scale the NOx sensor
pair differently), which is why decode takes an optional scaling map.
"""

from __future__ import annotations

from dataclasses import dataclass


class ObdError(Exception):
    pass


class UnknownPidError(ObdError):
    def __init__(self, pid: int):
        super().__init__(f"unknown PID 0x{pid:02X}")
        self.pid = pid


class PayloadLengthError(ObdError):
    def __init__(self, pid: int, expected: int, got: int):
        super().__init__(
            f"PID 0x{pid:02X} expects {expected} payload bytes, got {got}"
        )
        self.pid = pid


@dataclass(frozen=True)
class ChannelSpec:
    name: str
    unit: str
    first_byte: int
    n_bytes: int
    scale: float
    offset: float


@dataclass(frozen=True)
class PidSpec:
    pid: int
    description: str
    length: int
    channels: tuple[ChannelSpec, ...]


@dataclass(frozen=True)
class DecodedChannel:
    name: str
    value: float
    unit: str


PID_ENGINE_RPM = 0x0C
PID_VEHICLE_SPEED = 0x0D
PID_MAF = 0x10
PID_AMBIENT_TEMP = 0x46
PID_FUEL_RATE = 0x5E
PID_NOX_PAIR = 0xA1

PID_TABLE: dict[int, PidSpec] = {
    spec.pid: spec
    for spec in (
        PidSpec(
            PID_ENGINE_RPM,
            "engine speed",
            2,
            (ChannelSpec("rpm", "rpm", 0, 2, 0.25, 0.0),),
        ),
        PidSpec(
            PID_VEHICLE_SPEED,
            "vehicle speed",
            1,
            (ChannelSpec("velo_kmph", "km/h", 0, 1, 1.0, 0.0),),
        ),
        PidSpec(
            PID_MAF,
            "mass air flow",
            2,
            (ChannelSpec("maf_gps", "g/s", 0, 2, 0.01, 0.0),),
        ),
        PidSpec(
            PID_AMBIENT_TEMP,
            "ambient air temperature",
            1,
            (ChannelSpec("ambient_C", "°C", 0, 1, 1.0, -40.0),),
        ),
        PidSpec(
            PID_FUEL_RATE,
            "engine fuel rate",
            2,
            (ChannelSpec("fuel_Lph", "L/h", 0, 2, 0.05, 0.0),),
        ),
        PidSpec(
            PID_NOX_PAIR,
            "NOx sensors, upstream and downstream of the cleaning system",
            4,
            (
                ChannelSpec("nox_ppm_up", "ppm", 0, 2, 0.1, 0.0),
                ChannelSpec("nox_ppm_down", "ppm", 2, 2, 0.1, 0.0),
            ),
        ),
    )
}

# scaling override: pid -> ((scale, offset), ...) matching the channel count
ScalingMap = dict[int, tuple[tuple[float, float], ...]]


def decode_pid(
    pid: int, payload: bytes, scaling: ScalingMap | None = None
) -> tuple[DecodedChannel, ...]:
    """Decode a raw payload into physical channel values.

    Raises :class:`UnknownPidError` for PIDs outside the table and
    :class:`PayloadLengthError` on a size mismatch.
    """
    spec = PID_TABLE.get(pid)
    if spec is None:
        raise UnknownPidError(pid)
    if len(payload) != spec.length:
        raise PayloadLengthError(pid, spec.length, len(payload))
    overrides = (scaling or {}).get(pid)
    out = []
    for i, ch in enumerate(spec.channels):
        raw = int.from_bytes(payload[ch.first_byte : ch.first_byte + ch.n_bytes], "big")
        scale, offset = (ch.scale, ch.offset) if overrides is None else overrides[i]
        out.append(DecodedChannel(ch.name, raw * scale + offset, ch.unit))
    return tuple(out)


def encode_pid(
    pid: int, values: tuple[float, ...], scaling: ScalingMap | None = None
) -> bytes:
    """Encode physical values into a payload; quantizes to the PID's raw grid."""
    spec = PID_TABLE.get(pid)
    if spec is None:
        raise UnknownPidError(pid)
    if len(values) != len(spec.channels):
        raise ObdError(
            f"PID 0x{pid:02X} encodes {len(spec.channels)} channels, got {len(values)}"
        )
    overrides = (scaling or {}).get(pid)
    payload = bytearray(spec.length)
    for i, (ch, value) in enumerate(zip(spec.channels, values)):
        scale, offset = (ch.scale, ch.offset) if overrides is None else overrides[i]
        raw = round((value - offset) / scale)
        raw = max(0, min(raw, 256 ** ch.n_bytes - 1))
        payload[ch.first_byte : ch.first_byte + ch.n_bytes] = raw.to_bytes(
            ch.n_bytes, "big"
        )
    return bytes(payload)
