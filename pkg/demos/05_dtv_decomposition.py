"""Joint DTV decomposition into a fibre part u and a crack part v.

Run: python3 demos/05_dtv_decomposition.py
"""

from _common import save_panels

from dtvtomo import DecompParams, estimate_direction
from dtvtomo.experiments import DEFAULT_DECOMP_PARAMS, Scenario, decomposition_run, make_scenario

data = make_scenario(Scenario(size=128, n_angles=85))
theta = estimate_direction(data.noisy).theta_deg

panels = [("truth", data.truth)]
for alpha in (0.3, 1.5):
    p = DecompParams(alpha=alpha, theta_deg=theta, **DEFAULT_DECOMP_PARAMS)
    u, v, row = decomposition_run(data, p)
    print(f"alpha {alpha:g}: PSNR(u+v) {row['psnr']:.2f} dB, "
          f"crack fraction in u {row['crack_fraction_u']:.3f}, {row['iterations']} iterations")
    panels += [(f"u, alpha={alpha:g}", u), (f"v, alpha={alpha:g}", v)]

save_panels("05_dtv_decomposition", panels)
