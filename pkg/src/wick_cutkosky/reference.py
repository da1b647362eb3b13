"""Reference coupling eigenvalues lambda / m^2 for m1 = 4 m2 (delta = 0.6).

Values come from the completely separated equation and are used as ground
truth for the table-reproduction modes and the acceptance suite.
"""

DELTA = 0.6

# zero energy, one angular function (k = ell), ascending per ell
TABLE1 = {
    0: (1.838, 5.000, 9.817),
    1: (5.654, 10.43),
    2: (11.46,),
}
TABLE1_TOL = 0.005

# epsilon^2 -> (n_p, n_theta, lowest six, relative tolerance)
TABLE2 = {
    0.1: (20, 10, (1.686, 4.690, 5.156, 9.252, 9.688, 10.42), 0.005),
    0.5: (20, 10, (1.052, 3.112, 3.344, 6.174, 6.532, 6.748), 0.01),
    0.9: (25, 20, (0.3167, 0.8500, 1.550, 1.590, 2.534, 2.604), 0.015),
    0.99: (30, 30, (0.0702, 0.166, 0.286, 0.427, 0.590, 0.734), 0.06),
}
# the ground state near threshold is held to a tighter bound than the rest
TABLE2_GROUND_TOL = {0.99: 0.015}


def default_basis_size(epsilon2: float):
    """(n_p, n_theta) used for the reference runs at a given energy."""
    if epsilon2 == 0:
        return 20, 1
    if epsilon2 <= 0.5:
        return 20, 10
    if epsilon2 <= 0.9:
        return 25, 20
    return 30, 30
