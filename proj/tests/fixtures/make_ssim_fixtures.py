"""Regenerates the SSIM fixture images and prints reference values.

The reference is scikit-image's structural_similarity on Rec. 709 luma of
the 8-bit sRGB values (Gaussian window, sigma 1.5, population covariance,
data range 1). It averages over the interior that is at least 5 pixels
from the border, which is where the test compares.
"""
import numpy as np
from PIL import Image
from skimage import data, transform
from skimage.metrics import structural_similarity

rng = np.random.default_rng(2026)


def save(name, arr):
    Image.fromarray(arr.astype(np.uint8), "RGB").save(name)


def luma(a):
    a = a.astype(np.float64)
    return (0.2126 * a[..., 0] + 0.7152 * a[..., 1] + 0.0722 * a[..., 2]) / 255.0


y, x = np.mgrid[0:48, 0:64]
g = np.stack([x * 4, y * 5, (x + y) * 2], -1).clip(0, 255)
c = ((x // 8) + (y // 8)) % 2 * 200 + 30
c = np.stack([c, c * 0.8, c * 0.5], -1)
cam = (transform.resize(data.astronaut(), (64, 64), anti_aliasing=True) * 255).round().clip(0, 255)
pairs = {
    "gradient": (g, (g + rng.normal(0, 12, g.shape)).clip(0, 255).round()),
    "checker": (c, np.roll(c, 2, axis=1)),
    "astronaut": (cam, (cam * 0.7 + 40).clip(0, 255).round()),
}
for name, (a, b) in pairs.items():
    save(f"{name}_a.png", a)
    save(f"{name}_b.png", b)
    A = luma(np.asarray(Image.open(f"{name}_a.png")))
    B = luma(np.asarray(Image.open(f"{name}_b.png")))
    s = structural_similarity(A, B, gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=1.0)
    print(name, repr(float(s)))
