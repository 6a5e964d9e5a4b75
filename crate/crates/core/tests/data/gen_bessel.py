"""Reference values for spherical Bessel functions, computed with mpmath at
60 significant digits. Regenerate with `python3 gen_bessel.py > bessel_ref.txt`.

Columns: n re(z) im(z) re(j) im(j) re(j') im(j') re(y) im(y) re(y') im(y')
"""
import random
import mpmath as mp

mp.mp.dps = 60


def sph_j(n, z):
    return mp.sqrt(mp.pi / (2 * z)) * mp.besselj(n + mp.mpf(1) / 2, z)


def sph_y(n, z):
    return (-1) ** (n + 1) * mp.sqrt(mp.pi / (2 * z)) * mp.besselj(-n - mp.mpf(1) / 2, z)


def with_derivative(f, n, z):
    if n == 0:
        return f(0, z), -f(1, z)
    return f(n, z), (n * f(n - 1, z) - (n + 1) * f(n + 1, z)) / (2 * n + 1)


rng = random.Random(20240611)
points = [(2, mp.mpc(1, 1)), (3, mp.mpc(2, -0.5)), (1, mp.mpc(1, 2)), (0, mp.mpc(1, 0))]
orders = [0, 1, 2, 3, 5, 8, 12, 20, 25, 30]
for _ in range(400):
    n = rng.choice(orders)
    r = 50 * rng.random() ** 1.5 + 1e-3
    t = rng.uniform(-3.14159, 3.14159)
    points.append((n, mp.mpc(r * mp.cos(t), r * mp.sin(t))))
for n in orders:
    for z in [mp.mpc(0.05, 0.0), mp.mpc(0.9, 0.3), mp.mpc(n, 0.0) + 0.5, mp.mpc(0, 49.0),
              mp.mpc(35, -35), mp.mpc(-20, 3), mp.mpc(50, 0)]:
        points.append((n, z))

print(__doc__.strip().splitlines()[-1].replace("Columns:", "#"))
for n, z in points:
    j, dj = with_derivative(sph_j, n, z)
    y, dy = with_derivative(sph_y, n, z)
    vals = [z.real, z.imag, j.real, j.imag, dj.real, dj.imag, y.real, y.imag, dy.real, dy.imag]
    print(n, " ".join(mp.nstr(v, 20, min_fixed=1, max_fixed=0) for v in vals))
