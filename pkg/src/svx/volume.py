"""Multi-channel 3D volumes, label maps, MetaImage-subset I/O, smoothing, gradients.

Arrays are kept in (z, y, x) index order (x fastest in memory), matching the
raw-file layout: channel-major, x-fastest, little-endian.  ``dims`` fields and
header keys use the conventional (nx, ny, nz) order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import DataError, FormatError, IoError, ParamError

Spacing = tuple[float, float, float]

_HEADER_KEYS = {
    "NDims",
    "DimSize",
    "ElementSpacing",
    "Channels",
    "ElementType",
    "ElementByteOrderMSB",
    "ElementDataFile",
}

_DTYPES = {
    "MET_FLOAT": np.dtype("<f4"),
    "MET_UCHAR": np.dtype("u1"),
    "MET_UINT": np.dtype("<u4"),
}


@dataclass
class Volume:
    """Multi-channel scalar field with physical voxel spacing.

    ``data`` has shape (channels, nz, ny, nx) and float32 samples; all values
    must be finite.  Immutable by convention: operations return new volumes.
    """

    data: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float32)
        if self.data.ndim == 3:
            self.data = self.data[np.newaxis]
        if self.data.ndim != 4:
            raise ParamError(f"volume data must be 3D or 4D, got ndim={self.data.ndim}")
        if any(s <= 0 for s in self.data.shape):
            raise ParamError(f"degenerate volume shape {self.data.shape}")
        self.spacing = tuple(float(s) for s in self.spacing)
        if len(self.spacing) != 3 or any(s <= 0 or not math.isfinite(s) for s in self.spacing):
            raise ParamError(f"spacing must be 3 positive finite values, got {self.spacing}")
        if not np.isfinite(self.data).all():
            raise DataError("volume contains non-finite samples")

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def dims(self) -> tuple[int, int, int]:
        c, nz, ny, nx = self.data.shape
        return (nx, ny, nz)

    @property
    def voxel_count(self) -> int:
        return int(np.prod(self.data.shape[1:]))

    def channel(self, index: int) -> np.ndarray:
        if not 0 <= index < self.channels:
            raise ParamError(f"channel {index} out of range [0, {self.channels})")
        return self.data[index]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Volume)
            and self.spacing == other.spacing
            and self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data)
        )


@dataclass
class LabelMap:
    """Dense 3D label field: supervoxel partitions and binary masks.

    ``labels`` has shape (nz, ny, nx) with non-negative integers.
    """

    labels: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)

    def __post_init__(self):
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 3:
            raise ParamError(f"label map must be 3D, got ndim={self.labels.ndim}")
        if any(s <= 0 for s in self.labels.shape):
            raise ParamError(f"degenerate label map shape {self.labels.shape}")
        self.spacing = tuple(float(s) for s in self.spacing)
        if len(self.spacing) != 3 or any(s <= 0 or not math.isfinite(s) for s in self.spacing):
            raise ParamError(f"spacing must be 3 positive finite values, got {self.spacing}")
        if self.labels.min(initial=0) < 0:
            raise DataError("label map contains negative labels")

    @property
    def dims(self) -> tuple[int, int, int]:
        nz, ny, nx = self.labels.shape
        return (nx, ny, nz)

    @property
    def voxel_count(self) -> int:
        return int(self.labels.size)

    def n_labels(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def compact(self) -> "LabelMap":
        """Renumber labels to 0..K-1 in order of first appearance (scan order)."""
        flat = self.labels.ravel()
        _, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
        order = np.argsort(np.argsort(first))
        return LabelMap(order[inverse].reshape(self.labels.shape), self.spacing)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LabelMap)
            and self.spacing == other.spacing
            and self.labels.shape == other.labels.shape
            and np.array_equal(self.labels, other.labels)
        )


def _parse_header(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read header {path}: {exc}") from exc
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _HEADER_KEYS:
            raise FormatError(f"{path}:{lineno}: unknown header key {key!r}")
        if key in fields:
            raise FormatError(f"{path}:{lineno}: duplicate header key {key!r}")
        fields[key] = value
    for key in _HEADER_KEYS - {"Channels"}:
        if key not in fields:
            raise FormatError(f"{path}: missing header key {key!r}")
    return fields


def read_image(path: str | Path) -> Volume | LabelMap:
    """Read a MetaImage-subset header plus raw payload.

    Returns a Volume for MET_FLOAT element type, a LabelMap for MET_UCHAR or
    MET_UINT.  The raw file is resolved relative to the header's directory.
    """
    path = Path(path)
    fields = _parse_header(path)

    if fields["NDims"] != "3":
        raise FormatError(f"{path}: NDims must be 3, got {fields['NDims']!r}")
    if fields["ElementByteOrderMSB"] != "False":
        raise FormatError(f"{path}: only little-endian data supported")
    try:
        nx, ny, nz = (int(tok) for tok in fields["DimSize"].split())
        spacing = tuple(float(tok) for tok in fields["ElementSpacing"].split())
        channels = int(fields.get("Channels", "1"))
    except ValueError as exc:
        raise FormatError(f"{path}: malformed numeric header value: {exc}") from exc
    if len(spacing) != 3:
        raise FormatError(f"{path}: ElementSpacing must have 3 components")
    if min(nx, ny, nz) <= 0 or channels < 1:
        raise FormatError(f"{path}: non-positive DimSize/Channels")
    elem_type = fields["ElementType"]
    if elem_type not in _DTYPES:
        raise FormatError(f"{path}: unsupported ElementType {elem_type!r}")
    dtype = _DTYPES[elem_type]

    raw_path = path.parent / fields["ElementDataFile"]
    try:
        payload = raw_path.read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read raw data {raw_path}: {exc}") from exc
    expected = channels * nx * ny * nz * dtype.itemsize
    if len(payload) != expected:
        raise FormatError(
            f"{raw_path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    data = np.frombuffer(payload, dtype=dtype).reshape(channels, nz, ny, nx)

    if elem_type == "MET_FLOAT":
        if not np.isfinite(data).all():
            raise DataError(f"{raw_path}: non-finite float samples")
        return Volume(data.copy(), spacing)
    if channels != 1:
        raise FormatError(f"{path}: label maps must be single-channel")
    return LabelMap(data[0].astype(np.int64), spacing)


def write_image(image: Volume | LabelMap, path: str | Path) -> None:
    """Write header + raw pair; read_image round-trips it bit-exactly.

    Volumes are written as MET_FLOAT, label maps as MET_UINT.
    """
    path = Path(path)
    raw_name = path.stem + ".raw"
    if isinstance(image, Volume):
        elem_type = "MET_FLOAT"
        channels = image.channels
        payload = np.ascontiguousarray(image.data, dtype="<f4")
        nx, ny, nz = image.dims
    elif isinstance(image, LabelMap):
        if image.labels.max(initial=0) >= 2**32:
            raise ParamError("labels exceed uint32 range")
        elem_type = "MET_UINT"
        channels = 1
        payload = np.ascontiguousarray(image.labels, dtype="<u4")
        nx, ny, nz = image.dims
    else:
        raise ParamError(f"cannot write object of type {type(image).__name__}")

    lines = [
        "NDims = 3",
        f"DimSize = {nx} {ny} {nz}",
        "ElementSpacing = " + " ".join(repr(s) for s in image.spacing),
    ]
    if channels > 1:
        lines.append(f"Channels = {channels}")
    lines += [
        f"ElementType = {elem_type}",
        "ElementByteOrderMSB = False",
        f"ElementDataFile = {raw_name}",
    ]
    try:
        (path.parent / raw_name).write_bytes(payload.tobytes())
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def gaussian_smooth(volume: Volume, sigma: float) -> Volume:
    """Separable Gaussian smoothing with edge replication.

    Kernel is the sampled Gaussian, normalized, with radius ceil(3*sigma);
    sigma=0 returns an identical copy.
    """
    if not math.isfinite(sigma) or sigma < 0:
        raise ParamError(f"sigma must be finite and >= 0, got {sigma}")
    if sigma == 0:
        return Volume(volume.data.copy(), volume.spacing)
    radius = math.ceil(3.0 * sigma)
    out = volume.data.astype(np.float64)
    for axis in (1, 2, 3):
        out = ndimage.gaussian_filter1d(out, sigma, axis=axis, mode="nearest", radius=radius)
    return Volume(out.astype(np.float32), volume.spacing)


def gradient_field(volume: Volume, channel: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Finite-difference gradients (gx, gy, gz) in voxel units, float64.

    Central differences in the interior, one-sided at the volume faces.
    """
    data = volume.channel(channel).astype(np.float64)
    gz, gy, gx = np.gradient(data, edge_order=1)
    return gx, gy, gz


def gradient_magnitude(gx: np.ndarray, gy: np.ndarray, gz: np.ndarray) -> np.ndarray:
    return np.sqrt(gx * gx + gy * gy + gz * gz)
