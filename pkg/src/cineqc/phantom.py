"""Analytic cine heart phantom: ground truth images, labels and volumes.

The phantom supplies exact label maps and closed-form chamber areas, which
every downstream validation (reconstruction quality, segmentation quality,
functional parameters) is checked against.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .datamodel import (
    BACKGROUND,
    LV_BLOOD,
    LV_MYO,
    RV_BLOOD,
    CineVolume,
    FunctionalParams,
    LabelMap,
    PhantomSpec,
    PhantomSubject,
)
from .errors import SpecError


def pixel_grid_mm(nx: int, ny: int, dx_mm: float, dy_mm: float):
    """Physical coordinates of pixel centers, origin at the image center."""
    x = (np.arange(nx) - (nx - 1) / 2.0) * dx_mm
    y = (np.arange(ny) - (ny - 1) / 2.0) * dy_mm
    return np.meshgrid(x, y, indexing="ij")


def _radius_at(r_ed: float, fraction: float, t: np.ndarray | float, n_frames: int):
    """Contracting radius r(t) = r_ed - (r_ed - r_es) * sin^2(pi t / T)."""
    r_es = fraction * r_ed
    return r_ed - (r_ed - r_es) * np.sin(np.pi * np.asarray(t, dtype=float) / n_frames) ** 2


def circle_overlap_area(r1: float, r2: float, d: float) -> float:
    """Intersection area of two discs with radii r1, r2 and center distance d."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return np.pi * min(r1, r2) ** 2
    a1 = r1 * r1 * np.arccos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = r2 * r2 * np.arccos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    tri = 0.5 * np.sqrt(
        (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
    )
    return float(a1 + a2 - tri)


def _slice_scales(spec: PhantomSpec) -> np.ndarray:
    if spec.n_slices == 1:
        return np.ones(1)
    k = np.arange(spec.n_slices) / (spec.n_slices - 1)
    return 1.0 - spec.slice_taper * k


def analytic_areas_mm2(spec: PhantomSpec, frames: np.ndarray | None = None) -> dict:
    """Continuous per-frame areas (mm^2) of the three structures, base slice."""
    if frames is None:
        frames = np.arange(spec.n_frames)
    r_endo = _radius_at(spec.lv_endo_radius_mm, spec.contraction_fraction, frames, spec.n_frames)
    r_rv = _radius_at(spec.rv_radius_mm, spec.contraction_fraction, frames, spec.n_frames)
    lv = np.pi * r_endo**2
    myo = np.pi * (spec.lv_epi_radius_mm**2 - r_endo**2)
    rv = np.array(
        [
            np.pi * r * r - circle_overlap_area(r, spec.lv_epi_radius_mm, spec.rv_offset_mm)
            for r in np.atleast_1d(r_rv)
        ]
    )
    return {"lvbp": lv, "lvm": myo, "rvbp": rv}


def analytic_volumes_ml(spec: PhantomSpec) -> dict:
    """Per-frame chamber volumes in mL, summed over the tapered slice stack."""
    areas = analytic_areas_mm2(spec)
    scale = float(np.sum(_slice_scales(spec) ** 2))
    spacing = spec.geometry.slice_spacing_mm
    return {k: v * scale * spacing / 1000.0 for k, v in areas.items()}


def reference_params(spec: PhantomSpec) -> FunctionalParams:
    """Analytic functional parameters evaluated on the discrete frame grid.

    For the LV the ejection fraction reduces to 1 - contraction_fraction^2
    exactly (area scales with radius squared).
    """
    vols = analytic_volumes_ml(spec)
    lv, rv = vols["lvbp"], vols["rvbp"]
    lv_edv, lv_esv = float(lv.max()), float(lv.min())
    rv_edv, rv_esv = float(rv.max()), float(rv.min())
    return FunctionalParams(
        lv_edv_ml=lv_edv,
        lv_esv_ml=lv_esv,
        lv_ef=(lv_edv - lv_esv) / lv_edv if lv_edv > 0 else 0.0,
        rv_edv_ml=rv_edv,
        rv_esv_ml=rv_esv,
        rv_ef=(rv_edv - rv_esv) / rv_edv if rv_edv > 0 else 0.0,
        degenerate=lv_edv == 0 or rv_edv == 0,
    )


def generate_phantom(spec: PhantomSpec) -> tuple[CineVolume, LabelMap, FunctionalParams]:
    """Rasterize the phantom into a cine volume, exact label map and reference values.

    The label map is the exact rasterization of the continuous shapes at
    pixel centers; blood and myocardium voxels carry their palette intensity
    exactly, background gets a faint seeded texture so that subjects are
    distinguishable by registration.
    """
    geom = spec.geometry
    xs, ys = pixel_grid_mm(spec.nx, spec.ny, spec.dx_mm, spec.dx_mm)
    cx, cy = spec.lv_center_mm
    d_lv = np.hypot(xs - cx, ys - cy)
    rv_cx = cx - spec.rv_offset_mm
    d_rv = np.hypot(xs - rv_cx, ys - cy)

    scales = _slice_scales(spec)
    labels = np.zeros((spec.nx, spec.ny, spec.n_slices, spec.n_frames), dtype=np.uint8)
    for t in range(spec.n_frames):
        r_endo = _radius_at(spec.lv_endo_radius_mm, spec.contraction_fraction, t, spec.n_frames)
        r_rv = _radius_at(spec.rv_radius_mm, spec.contraction_fraction, t, spec.n_frames)
        for k, s in enumerate(scales):
            frame = np.zeros((spec.nx, spec.ny), dtype=np.uint8)
            frame[d_lv < s * r_endo] = LV_BLOOD
            frame[(d_lv >= s * r_endo) & (d_lv < s * spec.lv_epi_radius_mm)] = LV_MYO
            frame[(d_rv < s * r_rv) & (d_lv >= s * spec.lv_epi_radius_mm)] = RV_BLOOD
            labels[:, :, k, t] = frame

    palette = np.array(
        [
            spec.background_intensity,
            spec.blood_intensity,
            spec.myocardium_intensity,
            spec.blood_intensity,
        ]
    )
    data = palette[labels].astype(np.float64)

    if spec.texture_amplitude > 0:
        rng = np.random.default_rng(spec.seed)
        for k in range(spec.n_slices):
            field = gaussian_filter(rng.standard_normal((spec.nx, spec.ny)), sigma=spec.nx / 16)
            peak = np.abs(field).max()
            if peak > 0:
                field = field / peak * spec.texture_amplitude
            bg = labels[:, :, k, :] == BACKGROUND
            data[:, :, k, :] += field[:, :, None] * bg
        np.clip(data, 0.0, None, out=data)

    volume = CineVolume(data, geom)
    label_map = LabelMap(labels, geom)
    return volume, label_map, reference_params(spec)


def make_cohort(
    n_subjects: int,
    seed: int = 1234,
    nx: int = 128,
    dx_mm: float = 1.0,
    n_frames: int = 20,
    n_slices: int = 1,
) -> list[PhantomSubject]:
    """Draw a cohort of phantoms with jittered anatomy and contraction.

    Sizes scale with the field of view so the same anatomy fits any grid;
    contraction fractions span roughly the normal-to-impaired EF range.
    """
    if n_subjects < 1:
        raise SpecError("cohort needs at least one subject")
    rng = np.random.default_rng(seed)
    fov = nx * dx_mm
    subjects = []
    for i in range(n_subjects):
        endo = fov * rng.uniform(0.145, 0.19)
        epi = endo + fov * rng.uniform(0.055, 0.075)
        spec = PhantomSpec(
            nx=nx,
            ny=nx,
            n_frames=n_frames,
            n_slices=n_slices,
            dx_mm=dx_mm,
            lv_endo_radius_mm=endo,
            lv_epi_radius_mm=epi,
            rv_radius_mm=fov * rng.uniform(0.16, 0.20),
            rv_offset_mm=epi,
            contraction_fraction=rng.uniform(0.55, 0.80),
            lv_center_mm=(
                fov * rng.uniform(0.06, 0.10),
                fov * rng.uniform(-0.02, 0.02),
            ),
            seed=int(rng.integers(0, 2**31)),
        )
        volume, labels, ref = generate_phantom(spec)
        subjects.append(
            PhantomSubject(
                subject_id=f"phantom{i:03d}",
                volume=volume,
                labels=labels,
                reference=ref,
                spec=spec,
            )
        )
    return subjects
