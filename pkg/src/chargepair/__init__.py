"""Simulation toolkit for a pair of capacitively coupled charge qubits.

Submodules: ``numerics`` (small dense linear algebra), ``circuit`` (parameters
and Hamiltonian), ``gates`` (closed-form pulses), ``prep`` (Bell-pair
preparation), ``tomo`` (state tomography), ``dissipation`` (Bloch-Redfield
decay), ``chsh`` (Bell-inequality test) and ``cli`` (experiment runner).
"""

__version__ = "0.1.0"
