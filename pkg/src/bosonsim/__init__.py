"""Classical workbench for boson-to-qubit encodings, model Hamiltonians,
dynamics, open systems, downfolding, and bosonic truncation error bounds."""

__version__ = "0.1.0"
