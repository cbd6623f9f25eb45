"""Cut-based fused quality model for compressed tone-mapped HDR video."""

__version__ = "0.1.0"
