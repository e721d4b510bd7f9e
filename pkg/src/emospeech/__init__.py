"""Speech-emotion feature pipeline.

Extracts peak-timing features from speech audio via an MFCC energy contour,
manages labeled feature datasets, trains seven from-scratch classifiers, runs
repeated train-fraction sweep experiments, and synthesizes a deterministic
burst-timing corpus for end-to-end validation.
"""

__version__ = "0.1.0"
