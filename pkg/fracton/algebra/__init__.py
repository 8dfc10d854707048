"""
Exact rational algebra of universal classes and filling factors
"""
