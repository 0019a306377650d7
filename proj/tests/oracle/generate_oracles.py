"""Independent reference values for the unit tests (printed, then frozen by hand).

Uses mpmath at 40 digits for point values and scipy adaptive quadrature for
the radial kernel and the reduced rate integral.
"""
import math

import mpmath as mp
from scipy import integrate

mp.mp.dps = 40


def gamma_naive(k, kp, m):
    w = mp.sqrt(sum(mp.mpf(x) ** 2 for x in k) + mp.mpf(m) ** 2)
    wp = mp.sqrt(sum(mp.mpf(x) ** 2 for x in kp) + mp.mpf(m) ** 2)
    dot = sum(mp.mpf(a) * mp.mpf(b) for a, b in zip(k, kp))
    return (-w * wp + mp.mpf(m) ** 2 - dot) / ((w + wp) ** 2 * w * wp)


def gamma_float(k, kp, m):
    w = math.sqrt(sum(x * x for x in k) + m * m)
    wp = math.sqrt(sum(x * x for x in kp) + m * m)
    dot = sum(a * b for a, b in zip(k, kp))
    # -(w w' - m^2 + k.k') with w w' - (m^2 - k.k') = ((w w')^2 - (m^2 - k.k')^2) / (w w' + m^2 - k.k')
    a = w * wp
    b = m * m - dot
    num = -(a * a - b * b) / (a + b) if a + b > 0 else -(a - b)
    return num / ((w + wp) ** 2 * w * wp)


def K(rho, m, Lam):
    smax = math.sqrt(Lam * Lam - m * m)

    def f(th, s):
        r = (s * math.sin(th), 0.0, s * math.cos(th))
        k = (r[0], r[1], r[2] + rho / 2)
        kp = (r[0], r[1], r[2] - rho / 2)
        return s * s * math.sin(th) * gamma_float(k, kp, m)

    v, _ = integrate.dblquad(f, 0.0, smax, 0.0, math.pi, epsabs=0, epsrel=1e-12)
    return 2.0 * v


def radial_hat(f, R, rho):
    norm = 1 / (2 * mp.pi) ** 3
    if rho == 0:
        return norm * 4 * mp.pi * mp.quad(lambda s: f(s) * s * s, [0, R])
    return norm * 4 * mp.pi / rho * mp.quad(lambda s: f(s) * s * mp.sin(rho * s), mp.linspace(0, R, 9))


def main():
    print("gamma_kernel")
    for k, kp, m in [((0.3, -1.2, 0.7), (1.1, 0.4, -0.2), 1.0),
                     ((2.0, 0.0, 0.0), (-1.999, 0.001, 0.0), 0.5),
                     ((5.0, 1.0, -3.0), (0.2, 0.1, 0.05), 0.0)]:
        print(k, kp, m, mp.nstr(gamma_naive(k, kp, m), 20))
    print("radial_hat of (1 - s^2)^2 on [0, 1]")
    bump = lambda s: (1 - s * s) ** 2
    for rho in [0, 0.5, 3.0, 12.0]:
        print(rho, mp.nstr(radial_hat(bump, 1, mp.mpf(rho)), 20))
    print("K(rho), m = 1, Lambda = 10")
    for rho in [0.5, 1.0, 3.0]:
        print(rho, repr(K(rho, 1.0, 10.0)))
    print("K(rho), m = 0.5, Lambda = 6")
    print(1.0, repr(K(1.0, 0.5, 6.0)))

    # Reduced rate for the bump A = 0.1, w = 1, t0 = 0 at t = 0.5, m = 1, Lambda = 10.
    A, w, tau, m, Lam = 0.1, 1.0, 0.5, 1.0, 10.0
    a2 = A * math.exp(-tau * tau / (w * w))
    a1 = -2 * tau / (w * w) * a2
    g = lambda rho: (math.pi ** 1.5 * w ** 3 / (2 * math.pi) ** 3) * math.exp(-rho * rho * w * w / 4)
    N = -0.25
    integrand = lambda rho: N * 2 * m * m * rho * rho * 2 * (a1 * g(rho)) * (a2 * g(rho)) * K(rho, m, Lam) / (2 * math.pi) ** 4
    val, err = integrate.quad(integrand, 0.0, 14.0, epsabs=0, epsrel=1e-10, limit=200)
    print("reduced B2 bump", repr(val), err)


if __name__ == "__main__":
    main()
