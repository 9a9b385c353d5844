#!/usr/bin/env python3
"""Render synthetic shallow depth-of-field over a procedural scene.

Builds a scene with a textured foreground bar and bright background dots,
then renders bokeh at three focus settings and two blur strengths.
Outputs land in demos/out/.
"""

import numpy as np
from pathlib import Path
from scipy import ndimage

from bokehkit import RenderConfig, render_bokeh, save_image

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(42)
H, W = 384, 512

# background: dark field with bright specular dots that should grow into
# bokeh balls when defocused
img = np.full((H, W, 3), 0.08)
for _ in range(120):
    y, x = rng.integers(0, H), rng.integers(0, W)
    img[max(0, y - 1) : y + 2, max(0, x - 1) : x + 2] = rng.uniform(0.7, 1.0, 3)
img = ndimage.gaussian_filter(img, (0.6, 0.6, 0))

# foreground: textured horizontal bar across the lower third
bar = slice(int(H * 0.62), int(H * 0.88))
texture = ndimage.gaussian_filter(rng.random((H, W, 3)), (1.5, 1.5, 0))
img[bar] = 0.25 + 0.6 * texture[bar]

# depth: background plane far (1.0), bar near (0.25)
depth = np.full((H, W), 1.0)
depth[bar] = 0.25

save_image(img, OUT / "scene_input.png")

for name, focus in (("near", 0.25), ("far", 1.0)):
    for radius in (6.0, 14.0):
        cfg = RenderConfig(focus_depth=focus, max_radius=radius, work_scale=0.5)
        result = render_bokeh(img, depth, cfg)
        path = OUT / f"bokeh_focus-{name}_r{int(radius)}.png"
        save_image(result, path)
        print(f"focus={focus:<4} max_radius={radius:>4}  ->  {path.name}")

print(f"\nwrote results to {OUT}")
