"""Demonstration file format (*.agdm): a behavior spec plus recorded
(observation, action, reward, done, interrupted) step records."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from io import BytesIO

import numpy as np

from ..kernel import BehaviorSpec, Discrete
from .codec import MalformedBody, _Reader, _r_behavior_spec, _w_behavior_spec, _w_tensor

DEMO_MAGIC = b"AGDM"
DEMO_VERSION = 1


class BadMagic(Exception):
    pass


class VersionUnsupported(Exception):
    pass


class ShapeMismatch(Exception):
    pass


@dataclass
class DemoRecord:
    obs: list[np.ndarray]  # stacked shape per obs spec
    action: np.ndarray
    reward: float
    done: bool
    interrupted: bool = False

    def __eq__(self, other):
        if not isinstance(other, DemoRecord):
            return NotImplemented
        return (len(self.obs) == len(other.obs)
                and all(np.array_equal(a, b)
                        for a, b in zip(self.obs, other.obs))
                and np.array_equal(self.action, other.action)
                and self.reward == other.reward
                and self.done == other.done
                and self.interrupted == other.interrupted)


@dataclass
class DemoFile:
    behavior_spec: BehaviorSpec
    records: list[DemoRecord]

    def __eq__(self, other):
        if not isinstance(other, DemoFile):
            return NotImplemented
        return (self.behavior_spec == other.behavior_spec
                and self.records == other.records)


def _check_record(spec: BehaviorSpec, record: DemoRecord) -> None:
    if len(record.obs) != len(spec.obs_specs):
        raise ShapeMismatch(
            f"{len(record.obs)} obs streams, spec has {len(spec.obs_specs)}")
    for arr, ospec in zip(record.obs, spec.obs_specs):
        if tuple(arr.shape) != ospec.stacked_shape:
            raise ShapeMismatch(
                f"obs shape {arr.shape} != {ospec.stacked_shape}")
    action = np.atleast_1d(record.action)
    expected = (len(spec.action_spec.branches)
                if isinstance(spec.action_spec, Discrete)
                else spec.action_spec.dim)
    if action.shape != (expected,):
        raise ShapeMismatch(f"action shape {action.shape} != ({expected},)")


def write_demo(path: str, spec: BehaviorSpec,
               records: list[DemoRecord]) -> None:
    out = BytesIO()
    out.write(DEMO_MAGIC)
    out.write(struct.pack("<H", DEMO_VERSION))
    _w_behavior_spec(out, spec)
    out.write(struct.pack("<I", len(records)))
    for record in records:
        _check_record(spec, record)
        for arr in record.obs:
            _w_tensor(out, arr)
        _w_tensor(out, np.atleast_1d(
            np.asarray(record.action, dtype="<f4")))
        out.write(struct.pack("<f", record.reward))
        out.write(struct.pack("<BB", int(record.done),
                              int(record.interrupted)))
    with open(path, "wb") as fh:
        fh.write(out.getvalue())


def read_demo(path: str) -> DemoFile:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != DEMO_MAGIC:
        raise BadMagic(path)
    (version,) = struct.unpack("<H", data[4:6])
    if version != DEMO_VERSION:
        raise VersionUnsupported(version)
    r = _Reader(data[6:])
    spec = _r_behavior_spec(r)
    (count,) = struct.unpack("<I", r.take(4))
    records = []
    for _ in range(count):
        obs = [r.tensor() for _ in range(len(spec.obs_specs))]
        action_f = r.tensor()
        (reward,) = struct.unpack("<f", r.take(4))
        done, interrupted = r.take(1)[0], r.take(1)[0]
        if isinstance(spec.action_spec, Discrete):
            action = action_f.astype(np.int64)
        else:
            action = action_f
        record = DemoRecord(obs, action, reward, bool(done),
                            bool(interrupted))
        _check_record(spec, record)
        records.append(record)
    r.done()
    return DemoFile(spec, records)
