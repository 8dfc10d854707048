"""
Fracton universal classes: fractal spectrum, distribution and entanglement toolkit
"""

__version__ = "1.0.0"
