"""
Continuous-Variable Fidelity Witness Toolkit
Simulation and estimation of fidelity witnesses for Gaussian states,
Gaussian channels, coherent-state amplifiers and the cubic-phase gate.
"""

__version__ = "0.1.0"
