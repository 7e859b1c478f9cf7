"""Smoke test for the pyrbfw extension.

Build and copy the extension next to this script first:

    cargo build --release -p rbfw-py --features extension-module
    cp target/release/libpyrbfw.so python/pyrbfw.so
    python3 python/smoke.py
"""

import math

import pyrbfw


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


# Special functions
close(pyrbfw.bessel_j(0.5, 1.0), math.sqrt(2 / math.pi) * math.sin(1.0), 1e-13)
zeros = pyrbfw.jn_zeros(0.0, 3)
close(zeros[0], 2.404825557695773, 1e-12)

# Bessel series of a parabola on the unit disc
series = pyrbfw.analyze(lambda r: 1.0 - r * r, 2.0, 1.0, 20)
close(series(0.3), 0.91, 1e-3)
print(series, "errors", series.error(lambda r: 1.0 - r * r))

# B-transform round trip in the plane
gauss = lambda r: math.exp(-0.5 * r * r)
spec = pyrbfw.b_forward(gauss, 2.0)
close(spec(1.0).real, math.exp(-0.5), 1e-6)
cal = pyrbfw.calibrate(2.0)
back = pyrbfw.b_inverse(spec, cal, [0.0, 0.5, 1.0])
for r, v in zip([0.0, 0.5, 1.0], back):
    close(v, gauss(r), 1e-6)
print(cal, "round trip ok")

# Convection-diffusion scale
close(pyrbfw.convdiff_mu([2.0, 0.0], 1.0, 3.0), 2.0, 1e-15)

# Errors surface as RbfwError
try:
    pyrbfw.calibrate(2.0, "k")
except pyrbfw.RbfwError as e:
    print("calibrate k refused:", e)
else:
    raise AssertionError("K calibration unexpectedly verified")

print("smoke ok")
