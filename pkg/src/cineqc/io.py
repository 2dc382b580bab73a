"""Volume IO: single-file little-endian NIfTI-1 and a text-header raw format.

Only the subset needed here is implemented, by hand, so the on-disk bytes
stay auditable.  The raw format is ``<name>.bin`` (payload, C-order with the
frame axis slowest and x fastest) next to ``<name>.hdr`` (key=value lines).
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .datamodel import CineVolume, Geometry, LabelMap
from .errors import (
    CorruptHeader,
    DimensionError,
    IoError,
    UnsupportedDatatype,
)

_NIFTI_HDR = np.dtype(
    [
        ("sizeof_hdr", "<i4"),
        ("data_type", "S10"),
        ("db_name", "S18"),
        ("extents", "<i4"),
        ("session_error", "<i2"),
        ("regular", "S1"),
        ("dim_info", "S1"),
        ("dim", "<i2", 8),
        ("intent_p1", "<f4"),
        ("intent_p2", "<f4"),
        ("intent_p3", "<f4"),
        ("intent_code", "<i2"),
        ("datatype", "<i2"),
        ("bitpix", "<i2"),
        ("slice_start", "<i2"),
        ("pixdim", "<f4", 8),
        ("vox_offset", "<f4"),
        ("scl_slope", "<f4"),
        ("scl_inter", "<f4"),
        ("slice_end", "<i2"),
        ("slice_code", "S1"),
        ("xyzt_units", "S1"),
        ("cal_max", "<f4"),
        ("cal_min", "<f4"),
        ("slice_duration", "<f4"),
        ("toffset", "<f4"),
        ("glmax", "<i4"),
        ("glmin", "<i4"),
        ("descrip", "S80"),
        ("aux_file", "S24"),
        ("qform_code", "<i2"),
        ("sform_code", "<i2"),
        ("quatern_b", "<f4"),
        ("quatern_c", "<f4"),
        ("quatern_d", "<f4"),
        ("qoffset_x", "<f4"),
        ("qoffset_y", "<f4"),
        ("qoffset_z", "<f4"),
        ("srow_x", "<f4", 4),
        ("srow_y", "<f4", 4),
        ("srow_z", "<f4", 4),
        ("intent_name", "S16"),
        ("magic", "S4"),
    ]
)
assert _NIFTI_HDR.itemsize == 348

# NIfTI datatype code <-> numpy dtype
_DT_CODES = {2: np.uint8, 4: np.int16, 16: np.float32, 32: np.complex64}
_DT_BY_KIND = {np.dtype(v): k for k, v in _DT_CODES.items()}
_RAW_DTYPES = {"float32": np.float32, "complex64": np.complex64, "uint8": np.uint8}


def _infer_format(path: str | Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("nifti1", "raw"):
            raise IoError(f"unknown format {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix == ".nii":
        return "nifti1"
    if suffix in (".bin", ".hdr"):
        return "raw"
    raise IoError(f"cannot infer format from {path!r}; pass format explicitly")


def load_volume(path: str | Path, format: str | None = None) -> CineVolume:
    """Read a volume from NIfTI-1 or the raw format, geometry included."""
    fmt = _infer_format(path, format)
    if not os.path.exists(_primary_file(path, fmt)):
        raise IoError(f"no such file: {path}")
    data, geom = _load_nifti(path) if fmt == "nifti1" else _load_raw(path)
    return CineVolume(data, geom)


def save_volume(vol: CineVolume, path: str | Path, format: str | None = None) -> None:
    """Write a volume readable back by :func:`load_volume`.

    Complex data is stored as complex64, i.e. interleaved float32
    real/imaginary pairs; real data as float32.
    """
    fmt = _infer_format(path, format)
    arr = vol.data.astype(np.complex64 if vol.is_complex else np.float32)
    if fmt == "nifti1":
        _save_nifti(arr, vol.geometry, path)
    else:
        _save_raw(arr, vol.geometry, path)


def load_labels(path: str | Path, format: str | None = None) -> LabelMap:
    """Read a label map (integer payload) from either format."""
    fmt = _infer_format(path, format)
    if not os.path.exists(_primary_file(path, fmt)):
        raise IoError(f"no such file: {path}")
    data, geom = _load_nifti(path) if fmt == "nifti1" else _load_raw(path)
    return LabelMap(np.rint(np.real(data)).astype(np.uint8), geom)


def save_labels(labels: LabelMap, path: str | Path, format: str | None = None) -> None:
    fmt = _infer_format(path, format)
    arr = labels.labels.astype(np.uint8)
    if fmt == "nifti1":
        _save_nifti(arr, labels.geometry, path)
    else:
        _save_raw(arr, labels.geometry, path)


def _primary_file(path: str | Path, fmt: str) -> Path:
    p = Path(path)
    if fmt == "raw" and p.suffix.lower() == ".hdr":
        return p
    if fmt == "raw" and p.suffix.lower() != ".bin":
        return p.with_suffix(".bin")
    return p


# -- NIfTI-1 ---------------------------------------------------------------


def _expand_dims(arr: np.ndarray) -> np.ndarray:
    if arr.ndim == 2:
        return arr[:, :, None, None]
    if arr.ndim == 3:
        return arr[:, :, :, None]
    if arr.ndim == 4:
        return arr
    raise DimensionError(f"expected 2-4 dimensional data, got {arr.ndim}-D")


def _load_nifti(path: str | Path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if len(raw) < 348:
        raise CorruptHeader("file shorter than a NIfTI-1 header")
    hdr = np.frombuffer(raw[:348], dtype=_NIFTI_HDR)[0]
    magic = bytes(hdr["magic"])
    if magic not in (b"n+1\x00", b"ni1\x00"):
        raise CorruptHeader(f"bad magic {magic!r}")
    if int(hdr["sizeof_hdr"]) != 348:
        raise CorruptHeader("sizeof_hdr != 348 (big-endian or corrupt file)")
    code = int(hdr["datatype"])
    if code not in _DT_CODES:
        raise UnsupportedDatatype(f"NIfTI datatype code {code}")
    ndim = int(hdr["dim"][0])
    if not 2 <= ndim <= 4:
        raise DimensionError(f"dim[0] = {ndim}, expected 2-4")
    shape = tuple(int(d) for d in hdr["dim"][1 : ndim + 1])
    if any(d < 1 for d in shape):
        raise CorruptHeader(f"non-positive dims {shape}")

    dtype = np.dtype(_DT_CODES[code]).newbyteorder("<")
    count = int(np.prod(shape))
    if magic == b"n+1\x00":
        offset = int(hdr["vox_offset"])
        payload = raw[offset : offset + count * dtype.itemsize]
    else:
        img = path.with_suffix(".img")
        if not img.exists():
            raise IoError(f"pair-format data file missing: {img}")
        payload = img.read_bytes()[: count * dtype.itemsize]
    if len(payload) < count * dtype.itemsize:
        raise CorruptHeader("payload shorter than dim implies")
    data = np.frombuffer(payload, dtype=dtype).reshape(shape, order="F")
    data = _expand_dims(data)

    pixdim = hdr["pixdim"]
    descrip = bytes(hdr["descrip"]).split(b"\x00")[0].decode("ascii", "replace")
    thickness, gap = _parse_descrip(descrip, float(pixdim[3]) if ndim >= 3 else 8.0)
    geom = Geometry(
        dx_mm=float(pixdim[1]) if pixdim[1] > 0 else 1.0,
        dy_mm=float(pixdim[2]) if ndim >= 2 and pixdim[2] > 0 else 1.0,
        slice_thickness_mm=thickness,
        slice_gap_mm=gap,
        tr_ms=float(pixdim[4]) if ndim >= 4 and pixdim[4] > 0 else 2.6,
        n_frames=data.shape[3],
    )
    return data, geom


def _parse_descrip(descrip: str, dz: float):
    # round-trip hint written by _save_nifti; fall back to pixdim[3] as
    # thickness with zero gap (the split is not representable in NIfTI)
    thickness, gap = (dz if dz > 0 else 8.0), 0.0
    for part in descrip.split(";"):
        if "=" in part:
            key, _, val = part.partition("=")
            try:
                if key.strip() == "thk":
                    thickness = float(val)
                elif key.strip() == "gap":
                    gap = float(val)
            except ValueError:
                pass
    return thickness, gap


def _save_nifti(arr: np.ndarray, geom: Geometry, path: str | Path) -> None:
    arr = _expand_dims(arr)
    dtype = np.dtype(arr.dtype).newbyteorder("<")
    if dtype not in _DT_BY_KIND:
        raise UnsupportedDatatype(f"cannot store dtype {arr.dtype}")
    hdr = np.zeros(1, dtype=_NIFTI_HDR)[0]
    hdr["sizeof_hdr"] = 348
    hdr["regular"] = b"r"
    hdr["dim"][0] = 4
    hdr["dim"][1:5] = arr.shape
    hdr["dim"][5:] = 1
    hdr["datatype"] = _DT_BY_KIND[dtype]
    hdr["bitpix"] = dtype.itemsize * 8
    hdr["pixdim"][0] = 1.0
    hdr["pixdim"][1] = geom.dx_mm
    hdr["pixdim"][2] = geom.dy_mm
    hdr["pixdim"][3] = geom.slice_spacing_mm
    hdr["pixdim"][4] = geom.tr_ms
    hdr["vox_offset"] = 352.0
    hdr["scl_slope"] = 1.0
    hdr["xyzt_units"] = bytes([2 | 16])  # mm, msec
    hdr["descrip"] = f"thk={geom.slice_thickness_mm};gap={geom.slice_gap_mm}".encode()
    hdr["magic"] = b"n+1\x00"
    try:
        with open(path, "wb") as fh:
            fh.write(hdr.tobytes())
            fh.write(b"\x00" * 4)  # no header extensions
            fh.write(np.asfortranarray(arr.astype(dtype)).tobytes(order="F"))
    except OSError as exc:
        raise IoError(str(exc)) from exc


# -- raw format ------------------------------------------------------------


def _raw_paths(path: str | Path):
    p = Path(path)
    if p.suffix.lower() in (".bin", ".hdr"):
        p = p.with_suffix("")
    return p.with_suffix(".bin"), p.with_suffix(".hdr")


def _load_raw(path: str | Path):
    bin_path, hdr_path = _raw_paths(path)
    if not hdr_path.exists():
        raise IoError(f"missing sidecar header {hdr_path}")
    fields = {}
    for line in hdr_path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CorruptHeader(f"malformed header line {line!r}")
        key, _, val = line.partition("=")
        fields[key.strip()] = val.strip()
    try:
        nx, ny = int(fields["nx"]), int(fields["ny"])
        nslices, nframes = int(fields["nslices"]), int(fields["nframes"])
        geom = Geometry(
            dx_mm=float(fields["dx_mm"]),
            dy_mm=float(fields["dy_mm"]),
            slice_thickness_mm=float(fields["thickness_mm"]),
            slice_gap_mm=float(fields["gap_mm"]),
            tr_ms=float(fields["tr_ms"]),
            n_frames=nframes,
        )
        dtype_name = fields["dtype"]
    except KeyError as exc:
        raise CorruptHeader(f"header missing key {exc}") from exc
    except ValueError as exc:
        raise CorruptHeader(str(exc)) from exc
    if dtype_name not in _RAW_DTYPES:
        raise UnsupportedDatatype(f"raw dtype {dtype_name!r}")
    dtype = np.dtype(_RAW_DTYPES[dtype_name]).newbyteorder("<")
    try:
        payload = np.fromfile(bin_path, dtype=dtype)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    expected = nx * ny * nslices * nframes
    if payload.size != expected:
        raise CorruptHeader(f"payload has {payload.size} values, header implies {expected}")
    # stored frame-major with x fastest
    data = payload.reshape((nframes, nslices, ny, nx)).transpose(3, 2, 1, 0)
    return data, geom


def _save_raw(arr: np.ndarray, geom: Geometry, path: str | Path) -> None:
    arr = _expand_dims(arr)
    bin_path, hdr_path = _raw_paths(path)
    if arr.dtype == np.uint8:
        dtype_name = "uint8"
    elif arr.dtype.kind == "c":
        dtype_name = "complex64"
    else:
        dtype_name = "float32"
    dtype = np.dtype(_RAW_DTYPES[dtype_name]).newbyteorder("<")
    lines = [
        f"nx={arr.shape[0]}",
        f"ny={arr.shape[1]}",
        f"nslices={arr.shape[2]}",
        f"nframes={arr.shape[3]}",
        f"dx_mm={geom.dx_mm}",
        f"dy_mm={geom.dy_mm}",
        f"thickness_mm={geom.slice_thickness_mm}",
        f"gap_mm={geom.slice_gap_mm}",
        f"tr_ms={geom.tr_ms}",
        f"dtype={dtype_name}",
    ]
    try:
        hdr_path.write_text("\n".join(lines) + "\n")
        arr.astype(dtype).transpose(3, 2, 1, 0).tofile(bin_path)
    except OSError as exc:
        raise IoError(str(exc)) from exc
