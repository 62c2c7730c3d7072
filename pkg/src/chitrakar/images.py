"""Image loading, masking, and feature enhancement.

Images travel through the pipeline as numpy arrays:

* RGB image  — ``(H, W, 3)`` uint8, channels in [0, 255]
* binary mask — ``(H, W)`` bool, True = subject
* gray image — ``(H, W)`` float64, intensities in [0, 1]

Enhancement sharpens facial features by combining the grayscale image
with its Laplacian-of-Gaussian response, which steers the stippler
toward edges and dark structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

# Rec. 709 luma weights.
_LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])

LAPLACIAN_3X3 = np.array([[0, 1, 0], [1, -4, 1], [0, 1, 0]], dtype=np.float64)


class ImageLoadError(ValueError):
    """File missing, undecodable, or degenerate (zero-sized)."""


class UnsupportedParameterError(ValueError):
    """Requested a parameter value outside what this version supports."""


@dataclass(frozen=True)
class FilterParams:
    """Enhancement filter settings.

    sigma
        Gaussian width; the kernel side is ``2*ceil(3*sigma) + 1``.
    radius
        Laplacian kernel radius; only ``1`` (the 3x3 kernel) is supported.
    """

    sigma: float = 1.0
    radius: int = 1

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.radius < 1:
            raise ValueError(f"radius must be >= 1, got {self.radius}")


def validate_rgb(img: np.ndarray) -> np.ndarray:
    """Check an RGB image array and return it as uint8."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image dimensions must be positive")
    if arr.dtype != np.uint8:
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def validate_gray(img: np.ndarray) -> np.ndarray:
    """Check a grayscale image array and return it as float64 in [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected (H, W) gray array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image dimensions must be positive")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("gray intensities must lie in [0, 1]")
    return arr


def validate_mask(mask: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Check a binary mask against the image shape it applies to."""
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ValueError(f"expected (H, W) mask, got shape {arr.shape}")
    if arr.shape != shape:
        raise ValueError(f"mask shape {arr.shape} does not match image shape {shape}")
    return arr.astype(bool)


def load_image(path: str | Path) -> np.ndarray:
    """Load a PNG or JPEG file as an ``(H, W, 3)`` uint8 RGB array.

    Raises
    ------
    ImageLoadError
        If the file is missing, cannot be decoded, or has a zero dimension.
    """
    path = Path(path)
    if not path.is_file():
        raise ImageLoadError(f"no such image file: {path}")
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageLoadError(f"cannot decode image {path}: {exc}") from exc
    if arr.size == 0 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ImageLoadError(f"image has a zero dimension: {path}")
    return arr


def load_mask(path: str | Path, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Load a single-channel PNG as a boolean mask (nonzero = subject)."""
    path = Path(path)
    if not path.is_file():
        raise ImageLoadError(f"no such mask file: {path}")
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("L"))
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageLoadError(f"cannot decode mask {path}: {exc}") from exc
    mask = arr != 0
    if shape is not None:
        mask = validate_mask(mask, shape)
    return mask


def apply_mask(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Whiten everything outside the subject mask.

    Pixels where the mask is False become (255, 255, 255); subject pixels
    are returned unchanged. White background carries zero stipple weight
    downstream, so masked-out regions never attract points.
    """
    img = validate_rgb(img)
    mask = validate_mask(mask, img.shape[:2])
    out = img.copy()
    out[~mask] = 255
    return out


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Convert RGB to a luminance image in [0, 1] (0.2126 R + 0.7152 G + 0.0722 B)."""
    img = validate_rgb(img)
    return img.astype(np.float64) @ _LUMA_WEIGHTS / 255.0


def gaussian_kernel(sigma: float, *, normalize: bool = True) -> np.ndarray:
    """Discrete 2-D Gaussian ``exp(-(x^2+y^2)/(2 sigma^2)) / (2 pi sigma^2)``.

    The kernel is square with side ``2*ceil(3*sigma) + 1``. With
    ``normalize`` the weights are rescaled to sum to 1 so convolution
    preserves constant images.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    half = int(np.ceil(3.0 * sigma))
    ax = np.arange(-half, half + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax)
    kernel = np.exp(-(xx**2 + yy**2) / (2.0 * sigma**2)) / (2.0 * np.pi * sigma**2)
    if normalize:
        kernel = kernel / kernel.sum()
    return kernel


def gaussian_filter(img: np.ndarray, sigma: float) -> np.ndarray:
    """Blur with the normalized Gaussian kernel, replicate-padded at edges."""
    img = validate_gray(img)
    out = ndimage.convolve(img, gaussian_kernel(sigma), mode="nearest")
    return np.clip(out, 0.0, 1.0)


def laplacian_of_gaussian(img: np.ndarray, params: FilterParams) -> np.ndarray:
    """Gaussian blur followed by the 3x3 Laplacian, rescaled to [0, 1].

    The raw Laplacian response is signed; it is mapped affinely onto
    [0, 1] using its own min/max so downstream stages see a fixed range.
    A constant-response image (e.g. a constant input) maps to all 0.5.
    """
    if params.radius != 1:
        raise UnsupportedParameterError(
            f"only Laplacian radius 1 is supported, got {params.radius}"
        )
    blurred = gaussian_filter(img, params.sigma)
    response = ndimage.convolve(blurred, LAPLACIAN_3X3, mode="nearest")
    return rescale_unit(response)


def rescale_unit(arr: np.ndarray) -> np.ndarray:
    """Affine map of an array onto [0, 1]; constant arrays map to all 0.5."""
    lo = float(arr.min())
    hi = float(arr.max())
    if hi - lo < 1e-12:
        return np.full_like(arr, 0.5, dtype=np.float64)
    return (arr - lo) / (hi - lo)


def enhance(
    img: np.ndarray,
    params: FilterParams,
    mode: str = "multiply",
    *,
    log_img: np.ndarray | None = None,
) -> np.ndarray:
    """Combine the image with its Laplacian-of-Gaussian response.

    ``multiply`` takes the per-pixel product of the original and the LoG
    image; ``add-negative`` subtracts the LoG image from the original.
    Both results are clamped to [0, 1]. ``log_img`` substitutes a
    precomputed response for the one derived from ``params``.
    """
    img = validate_gray(img)
    if log_img is None:
        log_img = laplacian_of_gaussian(img, params)
    if mode == "multiply":
        out = img * log_img
    elif mode == "add-negative":
        out = img - log_img
    else:
        raise ValueError(f"unknown enhancement mode: {mode!r}")
    return np.clip(out, 0.0, 1.0)


def save_gray_png(img: np.ndarray, path: str | Path) -> None:
    """Write a [0, 1] gray image as an 8-bit PNG (debugging/stage dumps)."""
    img = validate_gray(img)
    Image.fromarray((img * 255.0).round().astype(np.uint8), mode="L").save(path)
