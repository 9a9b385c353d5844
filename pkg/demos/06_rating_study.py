#!/usr/bin/env python3
"""Set up a small blind rating study and aggregate a simulated session.

Creates a study directory with a reference and two candidate methods,
simulates one rater via the in-process API, and prints the MOS table.
To run the study interactively in a browser instead:

    BOKEHKIT_OPERATOR_TOKEN=secret bokehkit study-serve \
        --config demos/out/study/study.json \
        --static frontend/dist --listen 127.0.0.1:8080
"""

import json
import numpy as np
from pathlib import Path
from scipy import ndimage

from bokehkit import RenderConfig, render_bokeh, save_image
from bokehkit.mos.service import StudyServer
from bokehkit.mos.store import RatingStore, aggregate_mos, load_study_config

OUT = Path(__file__).parent / "out" / "study"
rng = np.random.default_rng(3)

# reference: a proper bokeh render; methods: weaker/stronger approximations
for sub in ("reference", "method_a", "method_b"):
    (OUT / sub).mkdir(parents=True, exist_ok=True)

image_ids = ["scene0", "scene1", "scene2"]
for image_id in image_ids:
    img = ndimage.gaussian_filter(rng.random((128, 160, 3)), (2, 2, 0))
    img = (img - img.min()) / (img.max() - img.min())
    depth = np.full((128, 160), 1.0)
    depth[64:] = 0.3
    reference = render_bokeh(img, depth, RenderConfig(focus_depth=0.3, max_radius=8, work_scale=1.0))
    save_image(reference, OUT / "reference" / f"{image_id}.png")
    weak = render_bokeh(img, depth, RenderConfig(focus_depth=0.3, max_radius=4, work_scale=0.25))
    save_image(weak, OUT / "method_a" / f"{image_id}.png")
    save_image(img, OUT / "method_b" / f"{image_id}.png")  # no bokeh at all

config_path = OUT / "study.json"
config_path.write_text(
    json.dumps(
        {
            "study_id": "demo-study",
            "reference_dir": "reference",
            "method_dirs": {"layered_r4": "method_a", "no_bokeh": "method_b"},
            "image_ids": image_ids,
            "ratings_per_pair_target": 1,
            "shuffle_seed": 99,
        },
        indent=2,
    )
)
print(f"study config: {config_path}")

store = RatingStore(OUT / "ratings.ndjson")
server = StudyServer(load_study_config(config_path), store, base_dir=OUT)

# simulate one rater who likes method_a more than method_b
preferences = {"layered_r4": 4, "no_bokeh": 2}
session = "demo-rater"
while True:
    task = server.next_task(session)
    if task.get("complete"):
        break
    method, _ = server._tasks_for(session)[task["task_id"]]
    server.submit_rating(session, task["task_id"], preferences[method])

print(f"{'method':<12} {'mos':>5} {'ratings':>8}")
for result in aggregate_mos(store.records()):
    print(f"{result.method:<12} {result.mos:>5.2f} {result.rating_count:>8}")
