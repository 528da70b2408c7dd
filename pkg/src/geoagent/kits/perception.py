"""Perception tools: native image processing plus adapters for external
expert models.

The expert models themselves (classifiers, detectors, grounding and
segmentation networks) are never reimplemented here; they are reached over a
single-POST HTTP contract, or served by a deterministic mock backend driven
by a fixture manifest so episodes can run hermetically.
"""

from __future__ import annotations

import base64
import json
import math
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ExternalServiceError, InvalidInputError
from ..raster import Raster, load_raster, save_raster
from ..workspace import Workspace
from .common import as_binary

# model name -> supported tasks
EXPERT_MODELS: dict[str, tuple[str, ...]] = {
    "MSCN": ("classify",),
    "RemoteCLIP": ("classify",),
    "SM3Det": ("detect",),
    "Strip_R_CNN": ("detect",),
    "RemoteSAM": ("ground",),
    "InstructSAM": ("count",),
    "SAM2": ("segment",),
    "ChangeOS": ("change", "segment"),
}


@dataclass(frozen=True)
class BBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise InvalidInputError(f"degenerate bounding box {self.as_list()}")

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @staticmethod
    def from_list(vals) -> "BBox":
        if len(vals) != 4:
            raise InvalidInputError(f"bounding box needs 4 coordinates, got {len(vals)}")
        return BBox(*(float(v) for v in vals))


# ---------------------------------------------------------------------------
# expert-model adapters
# ---------------------------------------------------------------------------


class ExpertBackend:
    """Dispatch surface for expert-model calls."""

    def call(self, model: str, task: str, image_paths: list[str],
             prompt: str | None) -> dict:
        raise NotImplementedError


class MockExpertBackend(ExpertBackend):
    """Deterministic backend answering from a fixture manifest.

    The manifest maps (image stem, task, prompt) to a typed result. For
    segment/change tasks the result may carry a `mask_threshold`; the mask is
    then derived from the first input image, which keeps the backend
    referentially transparent.
    """

    def __init__(self, manifest_path: str | Path, workspace: Workspace):
        try:
            entries = json.loads(Path(manifest_path).read_text())
        except FileNotFoundError as exc:
            raise ExternalServiceError(f"mock manifest not found: {manifest_path}") from exc
        self.workspace = workspace
        self._table: dict[tuple[str, str, str], dict] = {}
        for e in entries:
            key = (e["image"], e["task"], e.get("prompt") or "")
            self._table[key] = e["result"]

    @classmethod
    def from_entries(cls, entries: list[dict], workspace: Workspace
                     ) -> "MockExpertBackend":
        backend = cls.__new__(cls)
        backend.workspace = workspace
        backend._table = {}
        for e in entries:
            key = (e["image"], e["task"], e.get("prompt") or "")
            backend._table[key] = e["result"]
        return backend

    def call(self, model, task, image_paths, prompt):
        stem = Path(image_paths[0]).stem
        key = (stem, task, prompt or "")
        if key not in self._table:
            raise ExternalServiceError(
                f"no mock fixture for image={stem!r} task={task!r} prompt={prompt!r}"
            )
        result = self._table[key]
        if task in ("segment", "change") and "mask_threshold" in result:
            return {"mask": self._write_mask(image_paths, float(result["mask_threshold"]),
                                             stem, task)}
        return result

    def _write_mask(self, image_paths, threshold, stem, task) -> str:
        src = load_raster(self.workspace.resolve_input(image_paths[0]))
        band = src.band()
        mask = np.where(np.isnan(band), 0, (band > threshold).astype(np.uint8) * 255)
        out = self.workspace.resolve_output(f"perception/{task}_{stem}.tif")
        save_raster(Raster(mask.astype(np.uint8), geo=src.geo), out)
        return str(out)


class HttpExpertBackend(ExpertBackend):
    """Single-POST JSON adapter for remote expert models."""

    def __init__(self, base_url: str, timeout: float = 60.0, embed_images: bool = False):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.embed_images = embed_images

    def call(self, model, task, image_paths, prompt):
        payload: dict = {"model": model, "task": task, "prompt": prompt}
        if self.embed_images:
            payload["images_b64"] = [
                base64.b64encode(Path(p).read_bytes()).decode("ascii")
                for p in image_paths
            ]
        else:
            payload["images"] = [str(p) for p in image_paths]
        req = urllib.request.Request(
            self.base_url + "/infer",
            data=json.dumps(payload).encode("utf-8"),
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            raise ExternalServiceError(f"expert endpoint failed: {exc}") from exc


def expert_call(backend: ExpertBackend, model: str, task: str,
                image_paths: list[str], prompt: str | None = None) -> dict:
    """Invoke an expert model after checking the model/task pairing."""
    if model not in EXPERT_MODELS:
        raise InvalidInputError(f"unknown expert model {model!r}")
    if task not in EXPERT_MODELS[model]:
        raise InvalidInputError(f"model {model} does not support task {task!r}")
    if not image_paths:
        raise InvalidInputError("at least one image path required")
    return backend.call(model, task, image_paths, prompt)


# ---------------------------------------------------------------------------
# native image ops
# ---------------------------------------------------------------------------


def threshold_segmentation(r: Raster, threshold: float) -> Raster:
    """Binary segmentation: strictly greater -> 255, otherwise 0."""
    if r.bands != 1:
        raise InvalidInputError(f"segmentation expects a single band, got {r.bands}")
    b = r.band()
    out = np.where(np.isnan(b), 0, (b > threshold).astype(np.uint8) * 255)
    return Raster(out.astype(np.uint8), geo=r.geo)


def count_above_threshold(r: Raster, threshold: float) -> int:
    if r.bands != 1:
        raise InvalidInputError(f"count expects a single band, got {r.bands}")
    vals = r.values()
    return int(np.count_nonzero(vals > threshold))


def expand_bbox(box: BBox, radius: float,
                image_size: tuple[int, int] | None = None) -> BBox:
    """Grow a box by `radius` on every side, clamping to image bounds if given."""
    x0, y0 = box.x_min - radius, box.y_min - radius
    x1, y1 = box.x_max + radius, box.y_max + radius
    if image_size is not None:
        w, h = image_size
        x0, y0 = max(0.0, x0), max(0.0, y0)
        x1, y1 = min(float(w), x1), min(float(h), y1)
    return BBox(x0, y0, x1, y1)


def bboxes_to_centroids(boxes: list[BBox]) -> list[tuple[float, float]]:
    return [((b.x_min + b.x_max) / 2.0, (b.y_min + b.y_max) / 2.0) for b in boxes]


def centroid_distance_extremes(points: list[tuple[float, float]]) -> dict:
    """Closest and farthest point pairs with indices and distances."""
    if len(points) < 2:
        raise InvalidInputError("need at least 2 centroids for pairwise distances")
    best = (math.inf, -1, -1)
    worst = (-math.inf, -1, -1)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = math.dist(points[i], points[j])
            if d < best[0]:
                best = (d, i, j)
            if d > worst[0]:
                worst = (d, i, j)
    return {
        "closest": {"indices": [best[1], best[2]], "distance": best[0]},
        "farthest": {"indices": [worst[1], worst[2]], "distance": worst[0]},
    }


def total_bbox_area(boxes_xywh: list[list[float]]) -> float:
    """Total area of boxes given as [x, y, w, h]."""
    total = 0.0
    for b in boxes_xywh:
        if len(b) != 4:
            raise InvalidInputError(f"[x, y, w, h] box needs 4 values, got {len(b)}")
        w, h = float(b[2]), float(b[3])
        if w < 0 or h < 0:
            raise InvalidInputError(f"negative box extent in {b}")
        total += w * h
    return total


def _erode(img: np.ndarray) -> np.ndarray:
    """One pass of 3x3 binary erosion (edges treated as background)."""
    padded = np.pad(img, 1, constant_values=0)
    out = np.ones_like(img)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            out &= padded[1 + dy: 1 + dy + img.shape[0], 1 + dx: 1 + dx + img.shape[1]]
    return out


def _zhang_suen(img: np.ndarray) -> np.ndarray:
    """Zhang-Suen thinning of a binary image to a 1-pixel skeleton."""
    skel = np.pad(img.copy(), 1, constant_values=0)

    def neighbors(y, x):
        return [skel[y - 1, x], skel[y - 1, x + 1], skel[y, x + 1], skel[y + 1, x + 1],
                skel[y + 1, x], skel[y + 1, x - 1], skel[y, x - 1], skel[y - 1, x - 1]]

    changed = True
    while changed:
        changed = False
        for phase in (0, 1):
            to_clear = []
            ys, xs = np.nonzero(skel[1:-1, 1:-1])
            for y, x in zip(ys + 1, xs + 1):
                p = neighbors(y, x)
                b = sum(p)
                if not 2 <= b <= 6:
                    continue
                a = sum(1 for k in range(8) if p[k] == 0 and p[(k + 1) % 8] == 1)
                if a != 1:
                    continue
                if phase == 0:
                    if p[0] * p[2] * p[4] != 0 or p[2] * p[4] * p[6] != 0:
                        continue
                else:
                    if p[0] * p[2] * p[6] != 0 or p[0] * p[4] * p[6] != 0:
                        continue
                to_clear.append((y, x))
            if to_clear:
                changed = True
                for y, x in to_clear:
                    skel[y, x] = 0
    return skel[1:-1, 1:-1]


def _count_components(img: np.ndarray) -> int:
    """Count 8-connected components of a binary image."""
    visited = np.zeros_like(img, dtype=bool)
    h, w = img.shape
    count = 0
    for sy in range(h):
        for sx in range(w):
            if img[sy, sx] == 0 or visited[sy, sx]:
                continue
            count += 1
            stack = [(sy, sx)]
            visited[sy, sx] = True
            while stack:
                y, x = stack.pop()
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        ny, nx = y + dy, x + dx
                        if 0 <= ny < h and 0 <= nx < w and img[ny, nx] \
                                and not visited[ny, nx]:
                            visited[ny, nx] = True
                            stack.append((ny, nx))
    return count


def count_skeleton_contours(r: Raster) -> int:
    """Erode once, thin with Zhang-Suen, count 8-connected skeleton pieces."""
    band = as_binary(r.band(), "image")
    img = np.where(np.isnan(band), 0, band).astype(np.uint8)
    eroded = _erode(img)
    skeleton = _zhang_suen(eroded)
    return _count_components(skeleton)
