"""Desk-scale stand-in for a Kodak subset: natural photos at 768x512.

Uses photographs bundled with scikit-image and scikit-learn so no download
is needed. 3:2 sources are resampled to 768x512, larger ones are cropped.
Set ``QMF_DATASET`` to a directory of PNGs (e.g. real Kodak images) to use
those instead.
"""
import os
from pathlib import Path

import numpy as np

SIZE = (768, 512)  # width, height


def _sources():
    from PIL import Image
    from skimage import data
    from sklearn.datasets import load_sample_image

    out = {}
    for name in ("china.jpg", "flower.jpg"):
        out[name.split(".")[0]] = load_sample_image(name)
    out["rocket"] = data.rocket()
    out["coffee"] = data.coffee()
    hubble = data.hubble_deep_field()
    out["hubble"] = hubble[180:692, 116:884]
    out["motorcycle"] = np.asarray(data.stereo_motorcycle()[0])
    res = {}
    for k, v in out.items():
        im = Image.fromarray(np.ascontiguousarray(v[..., :3]), "RGB")
        if im.size != SIZE:
            im = im.resize(SIZE, Image.LANCZOS)
        res[k] = np.asarray(im, dtype=np.uint8)
    return res


def natural_images(limit=None):
    """Return ``{name: HxWx3 uint8}``."""
    env = os.environ.get("QMF_DATASET")
    if env:
        from qmfcodec.imageio import read_image

        files = sorted(p for p in Path(env).iterdir() if p.suffix.lower() in (".png", ".ppm"))
        imgs = {p.stem: read_image(p) for p in files}
    else:
        imgs = _sources()
    names = sorted(imgs)[:limit]
    return {k: imgs[k] for k in names}


def write_dataset(directory, limit=None):
    from qmfcodec.imageio import write_image

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, img in natural_images(limit).items():
        write_image(directory / f"{name}.png", img)
    return directory
