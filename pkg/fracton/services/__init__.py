"""
Numerical services: solver, entropy, entanglement, export and verification
"""
