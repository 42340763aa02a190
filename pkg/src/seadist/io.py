"""File formats: sequence files, config files, chart files, depth maps.

Sequence file (JSON Lines, UTF-8). Line 1 is the header::

    {"format": "seadist-sequence", "schema_version": 1, "sequence_id": "...",
     "camera": {...} | null, "normalization": {...} | null}

Every following line is one frame, frame ids strictly increasing::

    {"frame_id": 0, "timestamp_s": 0.0,
     "detections":   [{"bbox": [x1, y1, x2, y2], "class": "boat", "confidence": 0.9,
                       "distance_raw": 0.2, "distance_m": 100.0, "track_id": 4}],
     "ground_truth": [{"bbox": [...], "class": "buoy", "distance_m": 150.0,
                       "source": "chart", "object_id": 1}]}

``distance_raw``, ``distance_m`` (detections), ``track_id`` and ``object_id``
are optional. ``source`` is ``chart`` or ``human``. Blank lines are ignored.

Chart file (CSV): ``id,lat,lon,kind`` per line, decimal degrees, optional
header row, ``#`` starts a comment line.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from .baselines.camera import CameraPose
from .baselines.chart import ChartObject
from .baselines.depth import DepthMap
from .distnorm import NormalizationConfig
from .errors import InvalidConfig, ParseError, SchemaVersionMismatch, SeadistError
from .model import (
    BBox,
    Detection,
    Frame,
    GeoPoint,
    GroundTruthObject,
    GTSource,
    ObjectClass,
    check_frame_order,
)
from .simulator import NoiseConfig, ObjectSpec, ScenarioConfig

FORMAT_NAME = "seadist-sequence"
SCHEMA_VERSION = 1
CONFIG_DIR_ENV = "SEADIST_CONFIG_DIR"


@dataclass(frozen=True)
class SequenceFile:
    sequence_id: str
    frames: Tuple[Frame, ...]
    camera: Optional[CameraPose] = None
    normalization: Optional[NormalizationConfig] = None

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        check_frame_order(self.frames)

    @property
    def has_ground_truth(self) -> bool:
        return any(f.ground_truth for f in self.frames)


# -- dict conversion ---------------------------------------------------------

def camera_to_dict(pose: CameraPose) -> Dict[str, Any]:
    return {f.name: getattr(pose, f.name) for f in fields(CameraPose)}


def camera_from_dict(d: Dict[str, Any]) -> CameraPose:
    """Angles may be given as ``*_rad`` or ``*_deg``."""
    d = dict(d)
    for name in ("pitch", "roll", "hfov"):
        deg = d.pop(f"{name}_deg", None)
        if deg is not None:
            if f"{name}_rad" in d:
                raise InvalidConfig(f"give {name}_rad or {name}_deg, not both")
            d[f"{name}_rad"] = math.radians(float(deg))
    d.setdefault("roll_rad", 0.0)
    return CameraPose(**_known(d, CameraPose))


def normalization_to_dict(cfg: NormalizationConfig) -> Dict[str, Any]:
    return {"strategy": cfg.strategy.value, "d_max": cfg.d_max, "epsilon": cfg.epsilon}


def normalization_from_dict(d: Dict[str, Any]) -> NormalizationConfig:
    return NormalizationConfig(**_known(d, NormalizationConfig))


def noise_from_dict(d: Dict[str, Any]) -> NoiseConfig:
    d = dict(d)
    deg = d.pop("pitch_roll_noise_deg", None)
    if deg is not None:
        d["pitch_roll_noise_rad"] = math.radians(float(deg))
    return NoiseConfig(**_known(d, NoiseConfig))


def noise_to_dict(n: NoiseConfig) -> Dict[str, Any]:
    return {f.name: getattr(n, f.name) for f in fields(NoiseConfig)}


def scenario_from_dict(d: Dict[str, Any]) -> ScenarioConfig:
    """Scenario config fields: ``camera``, ``objects``, ``frame_rate_hz``, ``duration_s``, ``seed``.

    Each object: ``class``, ``position_m: [forward, right]``, optional
    ``velocity_mps: [forward, right]`` and ``id``.
    """
    d = dict(d)
    unknown = set(d) - {"camera", "objects", "frame_rate_hz", "duration_s", "seed"}
    if unknown:
        raise InvalidConfig(f"unknown scenario fields: {sorted(unknown)}")
    if "camera" not in d:
        raise InvalidConfig("scenario needs a camera")
    objs = []
    for k, o in enumerate(d.get("objects", [])):
        try:
            objs.append(ObjectSpec(
                cls=ObjectClass(o["class"]),
                position_m=_pair(o["position_m"]),
                velocity_mps=_pair(o.get("velocity_mps", (0.0, 0.0))),
                object_id=o.get("id"),
            ))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidConfig(f"object {k}: {e}") from None
    kw = {k: d[k] for k in ("frame_rate_hz", "duration_s", "seed") if k in d}
    return ScenarioConfig(objects=tuple(objs), camera=camera_from_dict(d["camera"]), **kw)


def scenario_to_dict(cfg: ScenarioConfig) -> Dict[str, Any]:
    return {
        "camera": camera_to_dict(cfg.camera),
        "frame_rate_hz": cfg.frame_rate_hz,
        "duration_s": cfg.duration_s,
        "seed": cfg.seed,
        "objects": [
            {"class": o.cls.label, "position_m": list(o.position_m),
             "velocity_mps": list(o.velocity_mps),
             **({"id": o.object_id} if o.object_id is not None else {})}
            for o in cfg.objects
        ],
    }


def _pair(v) -> Tuple[float, float]:
    a, b = v
    return (float(a), float(b))


def _known(d: Dict[str, Any], cls) -> Dict[str, Any]:
    names = {f.name for f in fields(cls)}
    unknown = set(d) - names
    if unknown:
        raise InvalidConfig(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    return dict(d)


def _bbox_list(b: BBox) -> List[float]:
    return [b.x1, b.y1, b.x2, b.y2]


def detection_to_dict(d: Detection) -> Dict[str, Any]:
    out: Dict[str, Any] = {"bbox": _bbox_list(d.bbox), "class": d.cls.label,
                           "confidence": d.confidence}
    if d.distance_raw is not None:
        out["distance_raw"] = d.distance_raw
    if d.distance_m is not None:
        out["distance_m"] = d.distance_m
    if d.track_id is not None:
        out["track_id"] = d.track_id
    return out


def gt_to_dict(g: GroundTruthObject) -> Dict[str, Any]:
    out: Dict[str, Any] = {"bbox": _bbox_list(g.bbox), "class": g.cls.label,
                           "distance_m": g.distance_m, "source": g.source.value}
    if g.object_id is not None:
        out["object_id"] = g.object_id
    return out


def frame_to_dict(f: Frame) -> Dict[str, Any]:
    return {
        "frame_id": f.frame_id,
        "timestamp_s": f.timestamp_s,
        "detections": [detection_to_dict(d) for d in f.detections],
        "ground_truth": [gt_to_dict(g) for g in f.ground_truth],
    }


def _bbox(v) -> BBox:
    if not isinstance(v, list) or len(v) != 4:
        raise ValueError("bbox must be a list of four numbers")
    return BBox(*(_num(x) for x in v))


def _num(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"expected a number, got {x!r}")
    return float(x)


def _opt_num(x) -> Optional[float]:
    return None if x is None else _num(x)


def _opt_int(x) -> Optional[int]:
    if x is None:
        return None
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValueError(f"expected an integer, got {x!r}")
    return x


def frame_from_dict(d: Dict[str, Any]) -> Frame:
    if not isinstance(d, dict):
        raise ValueError("frame record must be an object")
    dets = tuple(
        Detection(
            bbox=_bbox(r["bbox"]), cls=ObjectClass(r["class"]),
            confidence=_num(r["confidence"]),
            distance_raw=_opt_num(r.get("distance_raw")),
            distance_m=_opt_num(r.get("distance_m")),
            track_id=_opt_int(r.get("track_id")),
        )
        for r in d.get("detections", [])
    )
    gts = tuple(
        GroundTruthObject(
            bbox=_bbox(r["bbox"]), cls=ObjectClass(r["class"]),
            distance_m=_num(r["distance_m"]),
            source=GTSource(r.get("source", "chart")),
            object_id=_opt_int(r.get("object_id")),
        )
        for r in d.get("ground_truth", [])
    )
    return Frame(frame_id=_opt_int(d["frame_id"]), timestamp_s=_num(d["timestamp_s"]),
                 detections=dets, ground_truth=gts)


# -- sequence files ----------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False, separators=(",", ":"))


def dumps_sequence(seq: SequenceFile) -> str:
    header = {
        "format": FORMAT_NAME,
        "schema_version": SCHEMA_VERSION,
        "sequence_id": seq.sequence_id,
        "camera": camera_to_dict(seq.camera) if seq.camera else None,
        "normalization": normalization_to_dict(seq.normalization) if seq.normalization else None,
    }
    lines = [_dumps(header)] + [_dumps(frame_to_dict(f)) for f in seq.frames]
    return "\n".join(lines) + "\n"


def save_sequence(seq: SequenceFile, path) -> None:
    Path(path).write_text(dumps_sequence(seq), encoding="utf-8")


def parse_sequence(text: str) -> SequenceFile:
    header = None
    frames: List[Frame] = []
    prev: Optional[Frame] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(lineno, f"invalid JSON: {e.msg}") from None
        if header is None:
            header = _parse_header(record, lineno)
            continue
        try:
            frame = frame_from_dict(record)
        except KeyError as e:
            raise ParseError(lineno, f"missing field {e.args[0]!r}") from None
        except (SeadistError, ValueError, TypeError) as e:
            raise ParseError(lineno, str(e)) from None
        if prev is not None:
            if frame.frame_id <= prev.frame_id:
                raise ParseError(lineno, f"frame id {frame.frame_id} not after {prev.frame_id}")
            if frame.timestamp_s < prev.timestamp_s:
                raise ParseError(lineno, "timestamp decreases")
        frames.append(frame)
        prev = frame
    if header is None:
        raise ParseError(1, "empty sequence file (no header)")
    return SequenceFile(frames=tuple(frames), **header)


def _parse_header(record, lineno: int) -> Dict[str, Any]:
    if not isinstance(record, dict) or record.get("format") != FORMAT_NAME:
        raise ParseError(lineno, f"first line must be a {FORMAT_NAME} header")
    version = record.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"schema version {version!r} not supported (expected {SCHEMA_VERSION})"
        )
    try:
        cam = record.get("camera")
        norm = record.get("normalization")
        return {
            "sequence_id": str(record.get("sequence_id", "")),
            "camera": camera_from_dict(cam) if cam else None,
            "normalization": normalization_from_dict(norm) if norm else None,
        }
    except (SeadistError, TypeError, ValueError) as e:
        raise ParseError(lineno, f"bad header: {e}") from None


def load_sequence(path) -> SequenceFile:
    return parse_sequence(Path(path).read_text(encoding="utf-8"))


# -- configs, charts, depth maps --------------------------------------------

def resolve_config_path(path) -> Path:
    """Relative paths that do not exist are looked up in ``$SEADIST_CONFIG_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(CONFIG_DIR_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


def load_config(path) -> Dict[str, Any]:
    """YAML or JSON mapping."""
    p = resolve_config_path(path)
    try:
        data = yaml.safe_load(p.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise InvalidConfig(f"{p}: not valid YAML/JSON: {e}") from None
    if not isinstance(data, dict):
        raise InvalidConfig(f"{p}: expected a mapping at top level")
    return data


def load_chart(path) -> List[ChartObject]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if lineno == 1 and cells[:2] == ["id", "lat"]:
                continue
            if len(cells) != 4:
                raise ParseError(lineno, "chart rows need id,lat,lon,kind")
            try:
                out.append(ChartObject(cells[0], GeoPoint(float(cells[1]), float(cells[2])),
                                       ObjectClass(cells[3])))
            except (SeadistError, ValueError) as e:
                raise ParseError(lineno, str(e)) from None
    return out


def save_chart(chart: Sequence[ChartObject], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "lat", "lon", "kind"])
        for c in chart:
            w.writerow([c.id, repr(c.position.lat), repr(c.position.lon), c.kind.label])


def load_depth_map(path) -> DepthMap:
    return DepthMap(np.load(path))
