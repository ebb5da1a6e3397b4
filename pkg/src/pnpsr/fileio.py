"""PNG and PFM image I/O."""

from pathlib import Path

import numpy as np
from PIL import Image as PILImage


def read_png(path):
    """8-bit PNG as float64 in [0, 1]; grayscale stays 2-D, colour is (H, W, 3)."""
    with PILImage.open(path) as im:
        if im.mode in ("L", "I;16", "I", "1"):
            arr = np.asarray(im.convert("L"))
        else:
            arr = np.asarray(im.convert("RGB"))
    return arr.astype(np.float64) / 255.0


def to_uint8(img):
    img = np.asarray(img, dtype=np.float64)
    return np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_png(path, img):
    arr = to_uint8(img)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    # fixed encoder settings keep output bytes reproducible
    PILImage.fromarray(arr).save(path, format="PNG", optimize=False, compress_level=1)


def write_pfm(path, img):
    """Little-endian portable float map (scale -1.0), bottom row first, float32."""
    img = np.asarray(img)
    if img.ndim == 3 and img.shape[2] == 1:
        img = img[:, :, 0]
    if img.ndim == 2:
        tag = b"Pf"
    elif img.ndim == 3 and img.shape[2] == 3:
        tag = b"PF"
    else:
        raise ValueError(f"PFM holds 1 or 3 channels, got shape {img.shape}")
    h, w = img.shape[:2]
    data = np.ascontiguousarray(np.flipud(img), dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(tag + b"\n" + f"{w} {h}\n".encode() + b"-1.0\n")
        fh.write(data.tobytes())


def read_pfm(path):
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if len(parts) < 4 or parts[0].strip() not in (b"PF", b"Pf"):
        raise ValueError(f"{path}: not a PFM file")
    channels = 3 if parts[0].strip() == b"PF" else 1
    w, h = (int(v) for v in parts[1].split())
    scale = float(parts[2])
    dtype = "<f4" if scale < 0 else ">f4"
    count = w * h * channels
    data = np.frombuffer(parts[3], dtype=dtype, count=count)
    shape = (h, w, 3) if channels == 3 else (h, w)
    return np.flipud(data.reshape(shape)).astype(np.float32)
