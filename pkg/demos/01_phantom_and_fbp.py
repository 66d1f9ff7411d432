"""Fibre/crack phantom, its sinogram and a filtered back-projection.

Run: python3 demos/01_phantom_and_fbp.py
"""

from _common import save_panels

from dtvtomo import (NoiseSpec, PhantomSpec, add_noise, fbp_reconstruct, forward_project,
                     make_phantom, parallel_geometry, psnr)

M, N_ANGLES = 128, 85

truth = make_phantom(PhantomSpec(size=M, kind="fibre-crack", main_angle_deg=20.0))
geom = parallel_geometry(M, N_ANGLES)
clean = forward_project(truth, geom)
noisy = add_noise(clean, NoiseSpec(0.01, seed=1))

rec_clean = fbp_reconstruct(clean)
rec_noisy = fbp_reconstruct(noisy)
print(f"FBP PSNR noise-free {psnr(rec_clean, truth):.2f} dB, 1% noise {psnr(rec_noisy, truth):.2f} dB")

save_panels("01_phantom_and_fbp", [
    ("phantom", truth),
    ("sinogram (bins x angles)", noisy.data),
    ("FBP, noise-free", rec_clean),
    ("FBP, 1% noise", rec_noisy),
])
