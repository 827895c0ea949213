"""Experiment harness: accuracy/complexity, reconstruction, recognition.

Reproduces the published evaluation protocol at desk scale with built-in
deterministic images, emitting machine-readable reports whose non-timing
fields are bit-identical across runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import (BatchDecomposer, Image, decompose, default_scheme,
                     reconstruct)
from .errors import DataError
from .geometry import Scheme
from .invariants import (add_gaussian_noise, magnitude_features,
                         nn_classify, rotate_image)
from .methods import MethodSpec
from .metrics import ace, ccp, decomposition_time, msre, ssim

# ---------------------------------------------------------------------------
# built-in deterministic images
# ---------------------------------------------------------------------------


def unity_image(N: int) -> Image:
    return Image(np.ones((N, N)))


def checker_image(N: int, cells: int = 8) -> Image:
    idx = np.arange(N) * cells // N
    board = (idx[:, None] + idx[None, :]) % 2
    return Image(board.astype(float))


def radial_gradient_image(N: int) -> Image:
    x = (2.0 * np.arange(1, N + 1) - N) / N
    X, Y = np.meshgrid(x, x, indexing="ij")
    r = np.hypot(X, Y)
    return Image(np.clip(1.0 - r, 0.0, 1.0).T)


def photo_image(N: int) -> Image:
    """Photo-like synthetic: smooth large-scale structure, a few blobs,
    mild texture.  Deterministic closed form, no RNG."""
    x = (2.0 * np.arange(1, N + 1) - N) / N
    X, Y = np.meshgrid(x, x, indexing="ij")
    f = (0.55
         + 0.24 * np.sin(2.3 * X + 1.1 * Y + 0.7) * np.cos(1.9 * Y - 0.8 * X + 0.3)
         + 0.20 * np.exp(-((X - 0.30) ** 2 + (Y - 0.25) ** 2) / 0.09)
         - 0.17 * np.exp(-((X + 0.35) ** 2 + (Y + 0.20) ** 2) / 0.05)
         + 0.05 * np.sin(9.0 * X) * np.sin(7.0 * Y + 0.4))
    return Image(np.clip(f, 0.0, 1.0).T)


def gallery_image(N: int, index: int, seed: int = 7) -> Image:
    """One recognition class: a low-passed random field supported inside
    the inscribed disk (rotations then lose no content)."""
    rng = np.random.default_rng(seed * 100003 + index)
    noise = rng.standard_normal((N, N))
    f = np.fft.fft2(noise)
    kx = np.fft.fftfreq(N)[:, None]
    ky = np.fft.fftfreq(N)[None, :]
    f *= np.exp(-((kx ** 2 + ky ** 2) * (N / 10.0) ** 2) * 4.0)
    smooth = np.real(np.fft.ifft2(f))
    smooth = (smooth - smooth.min()) / (smooth.max() - smooth.min() + 1e-300)
    x = (2.0 * np.arange(1, N + 1) - N) / N
    X, Y = np.meshgrid(x, x, indexing="ij")
    r = np.hypot(X, Y).T
    taper = np.clip((0.92 - r) / 0.10, 0.0, 1.0)
    taper = taper * taper * (3.0 - 2.0 * taper)    # smoothstep
    return Image(np.clip(smooth * taper, 0.0, 1.0))


BUILTIN_IMAGES = {
    "unity": unity_image,
    "checker": checker_image,
    "gradient": radial_gradient_image,
    "photo": photo_image,
}


def load_image_source(source: str, N: int) -> Image:
    """'unity' / 'checker' / 'gradient' / 'photo' or a PGM path."""
    if source in BUILTIN_IMAGES:
        return BUILTIN_IMAGES[source](N)
    from .pgm import read_image_file
    try:
        return read_image_file(source)
    except FileNotFoundError as exc:
        raise DataError(f"image source {source!r} not found") from exc


# ---------------------------------------------------------------------------
# configuration and report plumbing
# ---------------------------------------------------------------------------

DEFAULT_METHODS = (
    {"family": "ZM"}, {"family": "PZM"}, {"family": "OFMM"},
    {"family": "CHFM"}, {"family": "PJFM"},
    {"family": "JFM", "p": 3.0, "q": 3.0},
    {"family": "RHFM"}, {"family": "EFM"}, {"family": "PCET"},
    {"family": "PCT"}, {"family": "PST"}, {"family": "BFM"},
    {"family": "FJFM", "p": 3.0, "q": 3.0, "alpha": 2.0},
    {"family": "GRHFM", "alpha": 2.0},
    {"family": "GPCET", "alpha": 1.5},
    {"family": "GPCT", "alpha": 1.0},
    {"family": "GPST", "alpha": 1.0},
)


@dataclass
class ExperimentConfig:
    methods: list[MethodSpec] = field(
        default_factory=lambda: [MethodSpec.from_dict(d) for d in DEFAULT_METHODS])
    K_values: list[int] = field(default_factory=lambda: [5, 10, 20])
    image_source: str = "unity"
    N: int = 128
    rotations: list[float] = field(
        default_factory=lambda: [10.0 * k for k in range(36)])
    noise_variances: list[float] = field(default_factory=lambda: [0.0, 0.1, 0.3])
    seed: int = 20240305
    gallery_count: int = 10
    repeats: int = 3
    strategies: list[str] | None = None     # accuracy experiment override
    scheme_overrides: dict | None = None    # family -> Scheme dict
    dump_dir: str | None = None

    def __post_init__(self):
        if not self.methods:
            raise DataError("config needs at least one method")
        if not self.K_values:
            raise DataError("config needs at least one K value")
        if any(k < 0 for k in self.K_values):
            raise DataError("K values must be non-negative")
        if any(v < 0 for v in self.noise_variances):
            raise DataError("noise variances must be non-negative")

    def scheme_for(self, method: MethodSpec) -> Scheme:
        if self.scheme_overrides:
            d = (self.scheme_overrides.get(method.label())
                 or self.scheme_overrides.get(method.family))
            if d:
                return Scheme.from_dict(d)
        return default_scheme(method)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot parse config {path}: {exc}") from exc
        kw = dict(raw)
        if "methods" in kw:
            kw["methods"] = [MethodSpec.from_dict(d) for d in kw["methods"]]
        return cls(**kw)


REPORT_COLUMNS = ("experiment", "method", "params", "K", "scheme",
                  "metric", "value", "flag")


@dataclass
class Report:
    rows: list[dict] = field(default_factory=list)
    format_version: int = 1

    def add(self, experiment: str, method: MethodSpec, K, scheme: str,
            metric: str, value, flag: str = "") -> None:
        params = ";".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in sorted(method.to_dict().items())
                          if k != "family")
        self.rows.append({
            "experiment": experiment, "method": method.family,
            "params": params, "K": K, "scheme": scheme,
            "metric": metric, "value": value, "flag": flag,
        })

    def values(self, **match) -> list:
        out = []
        for row in self.rows:
            if all(row[k] == v for k, v in match.items()):
                out.append(row["value"])
        return out

    def to_csv(self) -> str:
        lines = [",".join(REPORT_COLUMNS)]
        for row in self.rows:
            vals = []
            for col in REPORT_COLUMNS:
                v = row[col]
                vals.append(repr(v) if isinstance(v, float) else str(v))
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"format_version": self.format_version,
                           "rows": self.rows}, indent=1) + "\n"

    def write(self, csv_path, json_path=None) -> None:
        Path(csv_path).write_text(self.to_csv(), encoding="ascii")
        if json_path:
            Path(json_path).write_text(self.to_json(), encoding="ascii")


# ---------------------------------------------------------------------------
# experiment 1: accuracy and complexity on the unity image  (Fig. 9 analogue)
# ---------------------------------------------------------------------------

# the textbook direct method: incircle mapping, one kernel sample per
# pixel, per-coefficient summation
DIRECT_SCHEME = Scheme(mapping="incircle", rule="zoa", strategy="naive")
# the accurate production path for Jacobi kernels
RECURSIVE_SCHEME = Scheme(mapping="polar", rule="gauss:5", strategy="recursive")


def accuracy_schemes(method: MethodSpec) -> list[Scheme]:
    out = [DIRECT_SCHEME]
    if method.kind == "jacobi":
        out.append(RECURSIVE_SCHEME)
    elif method.kind == "harmonic":
        out.append(Scheme(mapping="polar", rule="gauss:5", strategy="fft"))
    return out


def run_accuracy(config: ExperimentConfig) -> Report:
    if config.image_source != "unity":
        raise DataError("the accuracy experiment runs on the unity image")
    img = unity_image(config.N)
    report = Report()
    for method in config.methods:
        schemes = ([Scheme.from_dict(s) if isinstance(s, dict) else s
                    for s in map(_strategy_to_scheme(method), config.strategies)]
                   if config.strategies else accuracy_schemes(method))
        for scheme in schemes:
            for K in config.K_values:
                ms = decompose(img, method, K, scheme)
                val = ace(ms)
                flag = "unstable" if not math.isfinite(val) else ""
                report.add("accuracy", method, K, scheme.label(), "ACE",
                           val, flag)
                dt = decomposition_time(
                    lambda: decompose(img, method, K, scheme),
                    repeats=config.repeats)
                report.add("accuracy", method, K, scheme.label(), "DT",
                           dt, "timing")
    return report


def _strategy_to_scheme(method: MethodSpec):
    def conv(strategy: str) -> Scheme:
        if strategy == "naive":
            return DIRECT_SCHEME
        if strategy == "recursive":
            return RECURSIVE_SCHEME
        if strategy == "fft":
            return Scheme(mapping="polar", rule="gauss:5", strategy="fft")
        if strategy == "symmetric":
            return Scheme(mapping="incircle", rule="zoa", strategy="symmetric")
        raise DataError(f"unknown strategy {strategy!r}")
    return conv


# ---------------------------------------------------------------------------
# experiment 2: reconstruction  (Fig. 10/11 analogue)
# ---------------------------------------------------------------------------

def run_reconstruction(config: ExperimentConfig) -> Report:
    img = load_image_source(config.image_source, config.N)
    Ks = sorted(config.K_values)
    report = Report()
    for method in config.methods:
        scheme = config.scheme_for(method)
        full = decompose(img, method, Ks[-1], scheme)
        for K in Ks:
            ms = full.truncated(K)
            raw = reconstruct(ms, img.n)
            e = msre(img.pixels, raw)
            s = ssim(img.pixels, raw)
            report.add("reconstruction", method, K, scheme.label(), "MSRE", e)
            report.add("reconstruction", method, K, scheme.label(), "SSIM", s)
            if config.dump_dir:
                from .pgm import write_pgm
                out = Path(config.dump_dir)
                out.mkdir(parents=True, exist_ok=True)
                name = f"recon_{method.label()}_K{K}.pgm".replace(",", "_")
                write_pgm(Image.from_raw(raw), out / name)
    return report


# ---------------------------------------------------------------------------
# experiment 3: rotation/noise recognition  (Table IV analogue)
# ---------------------------------------------------------------------------

def _noise_seed(base: int, img_idx: int, rot_idx: int, var_idx: int) -> int:
    return (base + 1000003 * img_idx + 1009 * rot_idx + 9176 * var_idx) % (2 ** 63)


def build_gallery(config: ExperimentConfig) -> list[tuple[str, Image]]:
    return [(f"class{i:02d}", gallery_image(config.N, i, config.seed))
            for i in range(config.gallery_count)]


def run_recognition(config: ExperimentConfig) -> Report:
    if config.gallery_count < 2:
        raise DataError("recognition needs at least two gallery images")
    gallery = build_gallery(config)
    # degraded test images are method-independent; build them once
    rotated = {}
    for gi, (label, img) in enumerate(gallery):
        for ri, ang in enumerate(config.rotations):
            rotated[(gi, ri)] = rotate_image(img, ang, "bilinear")
    report = Report()
    for method in config.methods:
        scheme = config.scheme_for(method)
        # feature extraction only needs scheme consistency between gallery
        # and queries; one kernel sample per pixel keeps the sweep fast
        if (config.scheme_overrides is None and scheme.mapping != "polar"
                and scheme.rule != "zoa"):
            scheme = scheme.with_(rule="zoa")
        for K in config.K_values:
            batch = BatchDecomposer(method, K, config.N, scheme)
            feats = [(label, magnitude_features(batch.run(img)))
                     for label, img in gallery]
            for vi, var in enumerate(config.noise_variances):
                preds, truth = [], []
                for gi, (label, _) in enumerate(gallery):
                    for ri in range(len(config.rotations)):
                        test = rotated[(gi, ri)]
                        if var > 0:
                            test = add_gaussian_noise(
                                test, var, _noise_seed(config.seed, gi, ri, vi))
                        q = magnitude_features(batch.run(test))
                        preds.append(nn_classify(q, feats))
                        truth.append(label)
                val = ccp(preds, truth)
                report.add("recognition", method, K,
                           f"{scheme.label()}|rot=bilinear|var={var:g}",
                           "CCP", val)
    return report


EXPERIMENTS = {
    "accuracy": run_accuracy,
    "reconstruction": run_reconstruction,
    "recognition": run_recognition,
}
