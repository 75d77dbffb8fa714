"""Optional real-data spot check.

Needs a local EuroSAT folder-per-class copy and an openly distributed
ViT-B/32 CLIP checkpoint; both are pointed at via environment variables and
the test is skipped when they are absent. Reference numbers: inductive
top-1 45.3 (tolerance +-3.0) and a positive transductive gain of +3.6
(tolerance +-5.0).
"""

import json
import os
import shutil
import subprocess
import sys

import pytest

EUROSAT_ENV = "RS_EUROSAT_DIR"
CHECKPOINT_ENV = "RS_CLIP_CHECKPOINT"

EXPECTED_INDUCTIVE = 45.3
INDUCTIVE_TOL = 3.0
EXPECTED_GAIN = 3.6
GAIN_TOL = 5.0

EUROSAT_CLASSES = [
    "AnnualCrop", "Forest", "HerbaceousVegetation", "Highway", "Industrial",
    "Pasture", "PermanentCrop", "Residential", "River", "SeaLake",
]


def _ready():
    return os.environ.get(EUROSAT_ENV) and os.environ.get(CHECKPOINT_ENV)


@pytest.mark.skipif(not _ready(), reason=f"set {EUROSAT_ENV} and {CHECKPOINT_ENV} to run")
def test_eurosat_spot_check(tmp_path):
    from extract_adapter import ClipEncoder, ExtractionManifest, extract

    manifest = ExtractionManifest(
        model=os.environ[CHECKPOINT_ENV],
        architecture="ViT-B/32",
        dataset_name="EuroSAT",
        dataset_root=os.environ[EUROSAT_ENV],
        class_names=EUROSAT_CLASSES,
        output_dir=str(tmp_path / "eurosat_out"),
        batch_size=64,
    )
    sidecar = extract(manifest, ClipEncoder(manifest.model, manifest.device))

    cli = [shutil.which("transduct")] if shutil.which("transduct") else [sys.executable, "-m", "transduct"]
    report = tmp_path / "report.json"
    proc = subprocess.run(
        [*cli, "solve",
         "--images", sidecar["files"]["images"],
         "--texts", sidecar["files"]["texts"],
         "--labels", sidecar["files"]["labels"],
         "--out", str(tmp_path / "pred.csv"), "--report", str(report),
         "--tau", str(sidecar["tau"]), "--affinity", "knn"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    loaded = json.loads(report.read_text())
    inductive = loaded["inductive_top1"]
    delta = loaded["delta"]
    assert abs(inductive - EXPECTED_INDUCTIVE) <= INDUCTIVE_TOL, (
        f"inductive top-1 {inductive:.1f} outside {EXPECTED_INDUCTIVE}+-{INDUCTIVE_TOL}"
    )
    assert delta > 0.0
    assert abs(delta - EXPECTED_GAIN) <= GAIN_TOL, (
        f"gain {delta:.1f} outside {EXPECTED_GAIN}+-{GAIN_TOL}"
    )
    print(f"\nPASS: EuroSAT spot check (inductive {inductive:.1f}, gain {delta:+.1f})")
