"""
gsinclusion - inclusion relations between Gelfand-Shilov type spaces.

Weight sequences, weight functions and weight systems with finite-horizon
verdicts for their growth conditions, an inclusion decision procedure and a
desk-scale verification harness for the operators behind it.
"""

__version__ = "0.1.0"
__author__ = "CokieMiner"
__license__ = "GPL v3"
