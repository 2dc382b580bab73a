"""Core containers: acquisition geometry, cine image stacks and label maps.

All containers are frozen dataclasses holding read-only numpy arrays, so
instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, SpecError

# Label codes used everywhere downstream.
BACKGROUND = 0
LV_BLOOD = 1
LV_MYO = 2
RV_BLOOD = 3

STRUCTURE_LABELS = {"lvbp": LV_BLOOD, "lvm": LV_MYO, "rvbp": RV_BLOOD}
STRUCTURE_NAMES = {v: k for k, v in STRUCTURE_LABELS.items()}


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    if out is arr and arr.flags.writeable:
        out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Geometry:
    """Physical geometry of a short-axis cine stack.

    Defaults follow the standard SAX protocol: 1.8 x 1.8 mm in-plane,
    8 mm slices with a 2 mm gap, TR 2.6 ms, 50 frames per cycle.
    """

    dx_mm: float = 1.8
    dy_mm: float = 1.8
    slice_thickness_mm: float = 8.0
    slice_gap_mm: float = 2.0
    tr_ms: float = 2.6
    n_frames: int = 50

    def __post_init__(self):
        if self.dx_mm <= 0 or self.dy_mm <= 0:
            raise SpecError("in-plane spacings must be positive")
        if self.slice_thickness_mm <= 0:
            raise SpecError("slice thickness must be positive")
        if self.slice_gap_mm < 0:
            raise SpecError("slice gap must be non-negative")
        if self.tr_ms <= 0:
            raise SpecError("TR must be positive")
        if self.n_frames < 2:
            raise SpecError("need at least 2 frames per cycle")

    @property
    def slice_spacing_mm(self) -> float:
        """Effective slice spacing (thickness + gap) used for volume integration."""
        return self.slice_thickness_mm + self.slice_gap_mm

    @property
    def voxel_volume_mm3(self) -> float:
        return self.dx_mm * self.dy_mm * self.slice_spacing_mm


@dataclass(frozen=True)
class CineVolume:
    """2D+t(+slice) image stack, shaped (nx, ny, n_slices, n_frames).

    Data may be real or complex; magnitude() gives the real view used by
    all image metrics.
    """

    data: np.ndarray
    geometry: Geometry

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 4:
            raise ShapeError(f"expected 4-D (nx, ny, n_slices, n_frames), got {arr.shape}")
        if arr.shape[0] < 8 or arr.shape[1] < 8:
            raise ShapeError("in-plane matrix must be at least 8 x 8")
        if arr.shape[3] != self.geometry.n_frames:
            raise ShapeError(
                f"frame axis {arr.shape[3]} does not match geometry.n_frames "
                f"{self.geometry.n_frames}"
            )
        if not np.all(np.isfinite(arr)):
            raise SpecError("volume contains non-finite values")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def nx(self) -> int:
        return self.data.shape[0]

    @property
    def ny(self) -> int:
        return self.data.shape[1]

    @property
    def n_slices(self) -> int:
        return self.data.shape[2]

    @property
    def n_frames(self) -> int:
        return self.data.shape[3]

    @property
    def is_complex(self) -> bool:
        return self.data.dtype.kind == "c"

    @property
    def intensity_range(self) -> tuple[float, float]:
        mag = np.abs(self.data)
        return float(mag.min()), float(mag.max())

    def magnitude(self) -> "CineVolume":
        if not self.is_complex:
            return self
        return CineVolume(np.abs(self.data), self.geometry)

    def frame(self, slice_index: int, frame_index: int) -> np.ndarray:
        return self.data[:, :, slice_index, frame_index]


@dataclass(frozen=True)
class LabelMap:
    """Integer segmentation over {0: bg, 1: LV blood, 2: LV myo, 3: RV blood}."""

    labels: np.ndarray
    geometry: Geometry

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 4:
            raise ShapeError(f"expected 4-D labels, got {arr.shape}")
        if arr.dtype.kind not in "iu":
            arr = arr.astype(np.uint8)
        if arr.size and (arr.min() < 0 or arr.max() > 3):
            raise SpecError("label codes must lie in {0, 1, 2, 3}")
        if arr.shape[3] != self.geometry.n_frames:
            raise ShapeError("frame axis does not match geometry.n_frames")
        object.__setattr__(self, "labels", _freeze(arr.astype(np.uint8)))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.labels.shape

    def frame(self, slice_index: int, frame_index: int) -> np.ndarray:
        return self.labels[:, :, slice_index, frame_index]

    def mask(self, label: int) -> np.ndarray:
        return self.labels == label


@dataclass(frozen=True)
class PhantomSpec:
    """Parameters of the analytic cine heart phantom.

    The left ventricle is modelled as two concentric discs (blood pool inside
    a myocardial annulus), the right ventricle as a crescent abutting the
    epicardium.  The endocardial and RV radii contract over the cycle as
    r(t) = r_ed - (r_ed - r_es) * sin^2(pi * t / T) with r_es =
    contraction_fraction * r_ed.
    """

    nx: int = 128
    ny: int = 128
    n_frames: int = 20
    n_slices: int = 1
    dx_mm: float = 1.0
    lv_endo_radius_mm: float = 22.0
    lv_epi_radius_mm: float = 30.0
    rv_radius_mm: float = 24.0
    rv_offset_mm: float = 30.0
    contraction_fraction: float = 0.632
    background_intensity: float = 0.2
    myocardium_intensity: float = 0.5
    blood_intensity: float = 1.0
    lv_center_mm: tuple[float, float] = (10.0, 0.0)
    slice_taper: float = 0.0  # per-slice shrink factor toward the apex
    texture_amplitude: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise SpecError("phantom grid must be at least 8 x 8")
        if not (0 < self.lv_endo_radius_mm < self.lv_epi_radius_mm):
            raise SpecError("need epi radius > endo radius > 0")
        if self.rv_radius_mm <= 0 or self.rv_offset_mm <= 0:
            raise SpecError("RV radii must be positive")
        if not (0.3 < self.contraction_fraction < 0.95):
            raise SpecError("contraction fraction must lie in (0.3, 0.95)")
        if self.n_frames < 2 or self.n_slices < 1:
            raise SpecError("need n_frames >= 2 and n_slices >= 1")
        if not (0 <= self.slice_taper < 0.9):
            raise SpecError("slice taper must lie in [0, 0.9)")

    @property
    def geometry(self) -> Geometry:
        return Geometry(dx_mm=self.dx_mm, dy_mm=self.dx_mm, n_frames=self.n_frames)

    @property
    def intensities(self) -> tuple[float, float, float]:
        return (
            self.background_intensity,
            self.myocardium_intensity,
            self.blood_intensity,
        )


@dataclass(frozen=True)
class FunctionalParams:
    """End-diastolic/systolic volumes (mL) and ejection fractions."""

    lv_edv_ml: float
    lv_esv_ml: float
    lv_ef: float
    rv_edv_ml: float
    rv_esv_ml: float
    rv_ef: float
    degenerate: bool = False

    def __post_init__(self):
        for edv, esv, ef in (
            (self.lv_edv_ml, self.lv_esv_ml, self.lv_ef),
            (self.rv_edv_ml, self.rv_esv_ml, self.rv_ef),
        ):
            if not (edv >= esv >= 0):
                raise SpecError("EDV >= ESV >= 0 violated")
            if not (0 <= ef <= 1):
                raise SpecError("EF must lie in [0, 1]")

    def as_dict(self) -> dict[str, float]:
        return {
            "lv_edv_ml": self.lv_edv_ml,
            "lv_esv_ml": self.lv_esv_ml,
            "lv_ef": self.lv_ef,
            "rv_edv_ml": self.rv_edv_ml,
            "rv_esv_ml": self.rv_esv_ml,
            "rv_ef": self.rv_ef,
        }


@dataclass(frozen=True)
class PhantomSubject:
    """One synthetic case: ground-truth images, labels and reference values."""

    subject_id: str
    volume: CineVolume
    labels: LabelMap
    reference: FunctionalParams
    spec: PhantomSpec = field(repr=False, default=None)
