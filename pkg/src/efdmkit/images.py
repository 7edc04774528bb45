"""8-bit RGB image I/O (PNG and binary PPM) and pixel quantization."""
from __future__ import annotations

import numpy as np
from PIL import Image

_CONVERTIBLE = {"RGB", "L", "P", "RGBA", "LA", "CMYK"}


def read_image(path) -> np.ndarray:
    """Load an image as a ``(H, W, 3)`` uint8 array.

    Grayscale and palette images are expanded to RGB; alpha is dropped.
    Modes deeper than 8 bits per channel are rejected.
    """
    with Image.open(path) as im:
        if im.mode not in _CONVERTIBLE:
            raise ValueError(f"{path}: unsupported image mode {im.mode!r}, need 8-bit RGB")
        arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return arr.copy()


def write_png(path, pixels: np.ndarray) -> None:
    pixels = np.asarray(pixels)
    if pixels.dtype != np.uint8 or pixels.ndim != 3 or pixels.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) uint8 pixels, got {pixels.dtype} {pixels.shape}")
    Image.fromarray(pixels, mode="RGB").save(path, format="PNG")


def quantize(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half to even."""
    return np.rint(np.clip(values, 0.0, 255.0)).astype(np.uint8)


def to_tensor(pixels: np.ndarray) -> np.ndarray:
    """``(H, W, 3)`` pixels as a float64 ``(1, 3, H, W)`` tensor."""
    return np.asarray(pixels, dtype=np.float64).transpose(2, 0, 1)[None].copy()


def from_tensor(t: np.ndarray) -> np.ndarray:
    return quantize(np.asarray(t)[0].transpose(1, 2, 0))
