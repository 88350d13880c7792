"""
Heat content of the unit interval for power-singular data x^{-a}, x^{-b}:
quadrature, asymptotic series and the checks tying them together.
"""
