"""Scratch: validate conventions against the published density-error tables."""
import math
import numpy as np
from rndfit import (
    VgParams, HestonParams, DensityGrid, grid_moments,
    heston_density_fft, vg_log_return_density, vg_moments,
    model_from_density, eval_model, l2_error, coeffs_from_density,
    vg_coeffs_gamma_measure, heston_coeffs_fourier,
)

# --- VG test parameters ---
vg = VgParams(theta=0.1, sigma=0.3, alpha=2.0)
t = 1.0
mean, std = vg_moments(vg, t)
print(f"VG mean {mean:.6f} (paper -0.0505), std {std:.6f} (paper 0.308)")

fx = lambda x: vg_log_return_density(vg, t, x)
grid = DensityGrid.from_callable(fx, mean, 12 * std, 2 ** 14)
gm = grid_moments(grid)
print(f"grid: mass {grid.integral():.8f} mean {gm.mean:.6f} std {gm.std:.6f} L2 {gm.l2:.6f} (paper 1.01)")

def err_table(target, model):
    fn = eval_model(model, target.x)
    d = np.abs(target.f - fn)
    gm = grid_moments(target)
    l2 = math.sqrt(float(np.trapezoid(d * d, target.x))) / gm.l2 * 100
    l1 = float(np.trapezoid(d, target.x)) / gm.l1 * 100
    li = float(np.max(d)) / gm.linf * 100
    return l2, l1, li

for flavor, n, opt, label, paper in [
    ("p", 1, False, "f_1p ", (17.6, 19.7, 19.0)),
    ("p", 1, True,  "f*_1p", (9.87, 12.4, 9.25)),
    ("m", 3, False, "f_3m ", (10.4, 12.6, 10.1)),
    ("m", 3, True,  "f*_3m", (7.39, 9.64, 5.14)),
]:
    m = model_from_density(grid, flavor, n, optimize=opt)
    e = err_table(grid, m)
    print(f"VG {label}: a={m.a:.5f} b={m.b:.6f} L2/L1/Linf = {e[0]:.2f}/{e[1]:.2f}/{e[2]:.2f}  paper {paper}")

# cross-check gamma-measure coefficient route
m1 = model_from_density(grid, "p", 3, optimize=False)
alt = vg_coeffs_gamma_measure(vg, t, m1.a, m1.b, 3)
print("VG coeff delta (grid vs gamma-measure):", np.max(np.abs(m1.coeffs - alt)))

# --- Heston test parameters ---
hp = HestonParams(v0=0.05, kappa=1.0, theta=0.1, eta=0.25, rho=-0.75)
hgrid = heston_density_fft(hp, 1.0)
hm = grid_moments(hgrid)
print(f"\nHeston grid: mass {hgrid.integral():.8f} mean {hm.mean:.6f} (paper -0.0342) "
      f"std {hm.std:.6f} (paper 0.271) L2 {hm.l2:.6f} (paper 1.11)")

for flavor, n, opt, label, paper in [
    ("p", 3, False, "f_3p ", (3.53, 4.68, 3.35)),
    ("p", 3, True,  "f*_3p", (3.08, 4.10, 2.83)),
    ("free", 2, False, "f_2  ", (12.2, 15.6, 11.2)),
    ("free", 2, True,  "f*_2 ", (7.17, 10.5, 5.18)),
    ("m", 5, False, "f_5m ", (3.07, 6.04, 6.63)),
    ("m", 5, True,  "f*_5m", (2.60, 3.55, 1.62)),
]:
    m = model_from_density(hgrid, flavor, n, optimize=opt)
    e = err_table(hgrid, m)
    print(f"Heston {label}: a={m.a:.5f} b={m.b:.6f} L2/L1/Linf = {e[0]:.2f}/{e[1]:.2f}/{e[2]:.2f}  paper {paper}")

# Fourier coefficient route cross-check
m3 = model_from_density(hgrid, "p", 3, optimize=False)
alth = heston_coeffs_fourier(hp, 1.0, m3.a, m3.b, 3)
print("Heston coeff delta (grid vs fourier):", np.max(np.abs(m3.coeffs - alth)))
