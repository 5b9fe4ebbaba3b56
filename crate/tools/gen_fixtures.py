#!/usr/bin/env python3
"""Generate the baseline grayscale JPEG fixture corpus used by the test suites.

Every fixture is 512x512, 8-bit, single component, encoded by libjpeg (through
Pillow) with the default Annex K Huffman tables and no restart markers at
quality factors 50, 70 and 90.

Outputs (relative to the repository root):
  crates/core/tests/fixtures/corpus/qf{50,70,90}/NN_<name>.jpg
  crates/core/tests/fixtures/reference/<name>_qf50.pgm   libjpeg-decoded pixels
  crates/core/tests/fixtures/reference/psnr.txt          PSNR oracle values

Run once; the outputs are committed.
"""
import os
import sys

import numpy as np
import matplotlib
import skimage.data as sd
from PIL import Image
from scipy.fft import dctn

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
OUT = os.path.join(ROOT, "crates", "core", "tests", "fixtures")
SIZE = 512
CORPUS = 50
MIN_CARRIERS = 13000

# Annex K luminance quantization table (natural order) and libjpeg QF scaling.
STD_LUMA_Q = np.array([
    16, 11, 10, 16, 24, 40, 51, 61,
    12, 12, 14, 19, 26, 58, 60, 55,
    14, 13, 16, 24, 40, 57, 69, 56,
    14, 17, 22, 29, 51, 87, 80, 62,
    18, 22, 37, 56, 68, 109, 103, 77,
    24, 35, 55, 64, 81, 104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
]).reshape(8, 8)


def qtable(qf):
    scale = 5000 // qf if qf < 50 else 200 - 2 * qf
    q = (STD_LUMA_Q * scale + 50) // 100
    return np.clip(q, 1, 255)


def gray(a):
    if a.dtype == bool:
        a = a.astype(np.uint8) * 255
    if a.ndim == 3:
        a = np.asarray(Image.fromarray(a[..., :3]).convert("L"))
    return a


def fit(a, side):
    """Scale so the shorter side equals `side`."""
    h, w = a.shape
    s = side / min(h, w)
    if abs(s - 1.0) < 1e-9:
        return a
    img = Image.fromarray(a).resize((max(side, round(w * s)), max(side, round(h * s))), Image.LANCZOS)
    return np.asarray(img)


def crops(a, n):
    """n evenly spaced SIZE x SIZE crops along the longer axis."""
    h, w = a.shape
    out = []
    for i in range(n):
        t = 0.5 if n == 1 else i / (n - 1)
        if h == w:
            y = x = int(round((h - SIZE) * t))
        else:
            y = int(round((h - SIZE) * t)) if h > w else (h - SIZE) // 2
            x = int(round((w - SIZE) * t)) if w > h else (w - SIZE) // 2
        out.append(a[y:y + SIZE, x:x + SIZE])
    return out


def estimated_carriers(a, qf):
    """Approximate count of +-1 quantized AC coefficients (float DCT)."""
    q = qtable(qf)
    x = a.astype(np.float64) - 128.0
    total = 0
    for by in range(0, SIZE, 8):
        for bx in range(0, SIZE, 8):
            c = dctn(x[by:by + 8, bx:bx + 8], norm="ortho")
            qc = np.round(c / q).astype(int)
            qc[0, 0] = 0
            total += int(np.sum(np.abs(qc) == 1))
    return total


def candidates():
    mpl = os.path.join(os.path.dirname(matplotlib.__file__), "mpl-data", "sample_data")
    hopper = np.asarray(Image.open(os.path.join(mpl, "grace_hopper.jpg")).convert("L"))
    src = {
        "astronaut": gray(sd.astronaut()),
        "camera": sd.camera(),
        "grass": sd.grass(),
        "gravel": sd.gravel(),
        "brick": sd.brick(),
        "moon": sd.moon(),
        "ihc": gray(sd.immunohistochemistry()),
        "hopper": hopper,
        "retina": gray(sd.retina()),
        "hubble": gray(sd.hubble_deep_field()),
        "motorcycle": gray(sd.stereo_motorcycle()[0]),
        "rocket": gray(sd.rocket()),
        "coffee": gray(sd.coffee()),
        "chelsea": gray(sd.chelsea()),
        "coins": sd.coins(),
        "cell": sd.cell(),
        "clock": sd.clock(),
    }
    out = []
    # The two named single-image fixtures come first.
    out.append(("portrait", src["astronaut"]))
    out.append(("texture", src["grass"]))
    for name in ["camera", "gravel", "brick", "moon", "ihc"]:
        out.append((name, src[name]))
    for name, n in [("hopper", 2), ("hubble", 3), ("motorcycle", 3), ("rocket", 3),
                    ("coffee", 3), ("chelsea", 3), ("coins", 2), ("cell", 2), ("clock", 2)]:
        for i, c in enumerate(crops(fit(src[name], SIZE), n)):
            out.append((f"{name}{i}", c))
    # Retina and hubble at a larger scale give additional distinct views.
    for name, n in [("retina", 4), ("hubble", 4)]:
        big = fit(src[name], 2 * SIZE)
        for i, c in enumerate(crops(big[SIZE // 2:SIZE // 2 + SIZE * 3 // 2, :], n)):
            out.append((f"{name}x{i}", c))
    # Geometric variants of texture-rich sources.
    for name in ["astronaut", "camera", "gravel", "grass", "ihc", "coffee", "chelsea", "hubble",
                 "motorcycle", "coins", "cell", "hopper"]:
        base = src[name] if src[name].shape == (SIZE, SIZE) else crops(fit(src[name], SIZE), 1)[0]
        out.append((f"{name}_flip", np.ascontiguousarray(base[:, ::-1])))
        out.append((f"{name}_rot", np.ascontiguousarray(np.rot90(base))))
        out.append((f"{name}_flipv", np.ascontiguousarray(base[::-1, :])))
    return out


def save_jpeg(a, path, qf):
    Image.fromarray(a, mode="L").save(path, "JPEG", quality=qf, optimize=False, progressive=False,
                                      subsampling=0)


def write_pgm(a, path):
    h, w = a.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(a.astype(np.uint8).tobytes())


def psnr(a, b):
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    return float("inf") if mse == 0 else 10.0 * np.log10(255.0 ** 2 / mse)


def main():
    pool = candidates()
    seen = set()
    scored = []
    for idx, (name, a) in enumerate(pool):
        assert a.shape == (SIZE, SIZE), (name, a.shape)
        if name in seen:
            continue
        seen.add(name)
        scored.append((idx, name, a, estimated_carriers(a, 50)))
    # Every corpus file must hold an 11000-bit payload in the coefficient
    # domain alone, so low-detail candidates are dropped.
    eligible = [t for t in scored if t[3] >= MIN_CARRIERS]
    print(f"{len(eligible)} of {len(scored)} candidates eligible", file=sys.stderr)
    assert len(eligible) >= CORPUS and eligible[0][1] == "portrait" and eligible[1][1] == "texture"
    chosen = eligible[:CORPUS]
    for _, name, _, cap in chosen:
        print(f"{name:16s} est. QF50 carriers {cap}", file=sys.stderr)

    for qf in (50, 70, 90):
        d = os.path.join(OUT, "corpus", f"qf{qf}")
        os.makedirs(d, exist_ok=True)
        for f in os.listdir(d):
            os.remove(os.path.join(d, f))
        for n, (_, name, a, _) in enumerate(chosen):
            save_jpeg(a, os.path.join(d, f"{n:02d}_{name}.jpg"), qf)

    ref = os.path.join(OUT, "reference")
    os.makedirs(ref, exist_ok=True)
    lines = []
    for name in ("portrait", "texture"):
        n = [i for i, c in enumerate(chosen) if c[1] == name][0]
        p50 = os.path.join(OUT, "corpus", "qf50", f"{n:02d}_{name}.jpg")
        p70 = os.path.join(OUT, "corpus", "qf70", f"{n:02d}_{name}.jpg")
        d50 = np.asarray(Image.open(p50))
        d70 = np.asarray(Image.open(p70))
        write_pgm(d50, os.path.join(ref, f"{name}_qf50.pgm"))
        write_pgm(d70, os.path.join(ref, f"{name}_qf70.pgm"))
        lines.append(f"{name}_qf50.pgm {name}_qf70.pgm {psnr(d50, d70):.6f}")
    with open(os.path.join(ref, "psnr.txt"), "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
