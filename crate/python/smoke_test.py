"""Smoke test for the fronts_lv extension module.

Build and install first, e.g.
    cd crates/python && maturin build --release -o dist && pip install dist/*.whl
"""

import math
import tempfile
from pathlib import Path

import fronts_lv


def main():
    k = fronts_lv.kappa(5.0)
    assert 0.8 < k < 0.83, k
    wave = fronts_lv.semiwave_profile(5.0)
    assert abs(wave["k"] - k) < 1e-12
    assert wave["profile"][0][1] == 0.0

    p = fronts_lv.ModelParams(a=2.0, b=0.5, c=0.5, d=1.0, beta=2.0, mu=2.0, g0=2.0, h0=1.5)
    assert p.to_dict()["beta"] == 2.0
    bounds = p.coexistence_bounds(50)[-1]
    assert abs(bounds["u_upper"] - 1.2) < 1e-10 and abs(bounds["v_lower"] - 1.6) < 1e-10

    traj = fronts_lv.simulate(p, ny=64, nxi=64, t_max=5.0, snapshot_interval=2.5)
    rec = traj.records
    assert len(rec) == 11 and len(rec["t"]) == len(rec["g"])
    assert all(b >= a for a, b in zip(rec["g"], rec["g"][1:]))
    assert traj.final_g == rec["g"][-1]
    assert traj.outcome()["prey"] == "spreading"
    assert traj.speeds()["prey_fit"]["slope"] > 0.0
    assert len(traj.snapshots) == 3

    above = fronts_lv.critical_gamma(math.pi / 2 + 0.1)
    assert above["value"]["kind"] == "spreads_for_all_gamma"

    try:
        fronts_lv.ModelParams(a=-1.0, b=0.5, c=0.5, d=1.0, beta=2.0, mu=2.0, g0=2.0, h0=1.5)
    except ValueError as e:
        assert "a" in str(e)
    else:
        raise AssertionError("negative a accepted")

    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "run.toml"
        cfg.write_text(
            "[model]\na = 2.0\nb = 0.5\nc = 0.5\nd = 1.0\nbeta = 2.0\nmu = 2.0\ng0 = 2.0\nh0 = 1.5\n"
            "[solver]\nny = 64\nnxi = 64\nt_max = 2.0\n"
        )
        summary = fronts_lv.run_config(cfg, Path(tmp) / "out")
        assert (Path(tmp) / "out" / "timeseries.csv").exists()
        assert summary["outcome"]["predator"] in ("spreading", "vanishing", "undecided")

    print("fronts_lv smoke test ok")


if __name__ == "__main__":
    main()
