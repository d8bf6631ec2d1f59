"""Haptic estimation of contact-surface normals and friction for legged robots."""
__version__ = "0.1.0"
