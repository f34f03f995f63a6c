# This file makes the rmtdensity directory a Python package

__version__ = "1.0.0"
