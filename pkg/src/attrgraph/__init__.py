"""Synthetic attributed graphs with controlled class structure."""

from .errors import GeneratorError
from .model import AttributedGraph, ClassSizeDistribution, GeneratorConfig, validate_config
from .pipeline import GenerationResult, generate

__version__ = "0.1.0"
