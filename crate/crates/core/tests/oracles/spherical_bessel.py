# Spherical Bessel j_n at complex argument, 30 digits; frozen in tests/analytic.rs.
from mpmath import mp, mpc, sqrt, pi, besselj

mp.dps = 30
for z in [mpc(1.5, 0.3), mpc(4.0, 1.0), mpc(0.2, 0.05)]:
    for n in [0, 3, 7]:
        v = sqrt(pi / (2 * z)) * besselj(n + 0.5, z)
        print(z, n, mp.nstr(v.real, 20), mp.nstr(v.imag, 20))
