"""Siren-vs-urban audio detection with MFCC/ZCR features and an Extreme Learning Machine."""

from .version_info import __version__

__all__ = ["__version__"]
