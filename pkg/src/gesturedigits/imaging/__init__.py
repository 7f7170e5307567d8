"""Color conversion, skin segmentation, morphology and shape features."""

from .image import ImageU8, BitMask, PixelBox, resize, load_png, save_png, load_mask_png, save_mask_png
from .color import rgb_to_ycbcr, rgb_to_hsv
from .segment import (
    DEFAULT_CB_RANGE,
    DEFAULT_CR_RANGE,
    HueGaussian,
    enhance,
    fit_hue_gaussian,
    skin_mask_gaussian,
    skin_mask_ycbcr,
)
from .morphology import morph_open, morph_close, erode3x3, dilate3x3
from .regions import largest_component_bbox, orientation, hu_moments

__all__ = [
    "ImageU8",
    "BitMask",
    "PixelBox",
    "resize",
    "load_png",
    "save_png",
    "load_mask_png",
    "save_mask_png",
    "rgb_to_ycbcr",
    "rgb_to_hsv",
    "DEFAULT_CB_RANGE",
    "DEFAULT_CR_RANGE",
    "HueGaussian",
    "enhance",
    "fit_hue_gaussian",
    "skin_mask_gaussian",
    "skin_mask_ycbcr",
    "morph_open",
    "morph_close",
    "erode3x3",
    "dilate3x3",
    "largest_component_bbox",
    "orientation",
    "hu_moments",
]
