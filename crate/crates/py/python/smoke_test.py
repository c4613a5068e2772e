"""Smoke test for the blockade Python module."""

import json
import math
import tempfile
from pathlib import Path

import blockade

SWEEP = """
name = "rf-homodyne"
observables = ["g2"]

[system]
system = "rf"
delta_s = 0.0
omega_s = 1e-4
gamma_s = 1.0

[homodyne]
f = 0.0
phi = 0.0

[[axes]]
param = "homodyne.f"
min = 0.0
max = 8.0
count = 17

[[axes]]
param = "homodyne.phi"
min = 0.0
max = 6.283185307179586
count = 9
"""


def main() -> None:
    assert blockade.__version__

    # perfect antibunching point of the Jaynes-Cummings cavity
    assert blockade.jc_g2(0.0, 0.0, 1.0, 0.1, 0.01) > 0.0
    n_s, g2 = blockade.rf_homodyne_gn(2, 4.0, math.pi, 1e-4, 1.0, 0.0)
    assert n_s > 0.0 and g2 < 1e-10, (n_s, g2)
    assert len(blockade.ao_g2_zeros(1.0, 1.0, -0.5)) >= 1
    assert 0.0 < blockade.minimal_dst_g2(0.3) < 1.0

    result = blockade.sweep(SWEEP)
    assert result["columns"] == ["homodyne.f", "homodyne.phi", "g2", "status", "detail"]
    assert result["shape"] == [17, 9]
    cells = [
        (c, v[0])
        for c, v, s in zip(result["coords"], result["values"], result["status"])
        if s == "ok" and c[0] > 0.0
    ]
    (f, phi), best = min(cells, key=lambda cell: cell[1])
    assert (f, round(phi, 12)) == (4.0, round(math.pi, 12)) and best < 1e-10

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "run.toml"
        path.write_text(SWEEP)
        csv, meta = blockade.write_sweep(str(path))
        assert Path(csv).name == "rf-homodyne.csv" and Path(meta).exists()

    report = json.loads(blockade.verify("identities", seed=1))
    assert report["passed"], report

    try:
        blockade.sweep("name = 1")
    except ValueError:
        pass
    else:
        raise AssertionError("a malformed config must raise ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
