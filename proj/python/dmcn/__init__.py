"""DMCN super-resolution toolkit bindings."""

from ._dmcn import (
    ContractError,
    Model,
    ModelConfig,
    ParseError,
    bicubic_resize,
    build_model,
    count_layers,
    estimate_flops,
    estimate_flops_flat_equivalent,
    load_model,
    make_ilr,
    psnr,
    ssim,
)

__all__ = [
    "ContractError",
    "Model",
    "ModelConfig",
    "ParseError",
    "bicubic_resize",
    "build_model",
    "count_layers",
    "estimate_flops",
    "estimate_flops_flat_equivalent",
    "load_model",
    "make_ilr",
    "psnr",
    "ssim",
]
