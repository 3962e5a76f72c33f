#!/usr/bin/env python3
"""Writes the bundled scenario configs and hand trajectories into scenarios/.

Fingertips hover 3 cm above a row of piano keys (plane segments at 0.80 m,
100 N/m). A press to 1 cm depth therefore asks for 1.0 N.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
FINGERS = ["thumb", "index", "middle", "ring", "little"]
KEY_HEIGHT = 0.80
HOVER = 0.83
KEY_STIFFNESS = 100.0
X = [0.0, 0.04, 0.08, 0.12, 0.16]
Y = [-0.03, 0.0, 0.0, 0.0, 0.0]
PRESS_SPEED = 0.1  # m/s

MODEL = {
    "mass": 0.027,
    "inertia": [1.4e-5, 1.4e-5, 2.2e-5],
    "attach_below": 0.01,
    # Crazyflie-scale airframe with uprated motors: 1.0 N of pull on top of
    # the 0.26 N weight needs more than the stock 0.43 N of thrust.
    "rotors": {"k_f": 1.7e-8, "k_m": 1.4e-10, "arm_length": 0.046,
               "omega_min": 0.0, "omega_max": 5500.0},
}

ELASTIC = {"kind": "elastic", "rest_length": 0.5, "stiffness": 50.0, "damping": 0.5}
INEXTENSIBLE = {"kind": "inextensible", "rest_length": 0.5,
                "constraint_stiffness": 2000.0, "constraint_damping": 10.0}


def keys():
    return [{"type": "horizontal_plane", "height": KEY_HEIGHT, "stiffness": KEY_STIFFNESS,
             "damping": 0.5,
             "extent": {"x_min": x - 0.015, "x_max": x + 0.015, "y_min": y - 0.1,
                        "y_max": y + 0.1}}
            for x, y in zip(X, Y)]


def config(policy, tethers, duration, trajectory, finger=None, noise=True):
    cfg = {
        "duration": duration,
        "physics_dt": 0.001,
        "control_rate": 100,
        "gravity": 9.81,
        "seed": 7,
        "model": MODEL,
        "assignment": {"policy": policy},
        "tethers": tethers,
        "scene": {"surfaces": keys(), "lead_time": 0.3, "deactivation_delay": 0.1,
                  "ramp_time": 0.05, "max_force": 1.5, "follow_offset": [0.0, 0.0, 0.4],
                  "prediction_horizon": 1.0},
        "mocap": {"rate": 100, "position_noise_std": 0.0005 if noise else 0.0,
                  "attitude_noise_std": 0.0034906585 if noise else 0.0, "latency": 0.01},
        "trajectory": trajectory,
    }
    if finger:
        cfg["assignment"]["finger"] = finger
    return cfg


class Track:
    """Piecewise-linear height profile for each finger."""

    def __init__(self):
        self.knots = {f: [(0.0, HOVER)] for f in range(5)}

    def press(self, finger, start, depth, hold):
        """Descend from hover to `depth` below the key, hold, come back up."""
        low = KEY_HEIGHT - depth
        travel = (HOVER - low) / PRESS_SPEED
        k = self.knots[finger]
        k.append((start, HOVER))
        k.append((start + travel, low))
        k.append((start + travel + hold, low))
        k.append((start + 2 * travel + hold, HOVER))

    def write(self, path, duration):
        times = sorted({t for k in self.knots.values() for t, _ in k} | {duration})
        rows = []
        for t in times:
            row = [t]
            for f in range(5):
                row += [X[f], Y[f], self._z(f, t)]
            rows.append(row)
        header = ["t"] + [f"{n}_{a}" for n in FINGERS for a in "xyz"]
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for r in rows:
                fh.write(",".join(f"{v:.6g}" for v in r) + "\n")

    def _z(self, f, t):
        k = self.knots[f]
        if t <= k[0][0]:
            return k[0][1]
        for (t0, z0), (t1, z1) in zip(k, k[1:]):
            if t0 <= t <= t1:
                return z0 if t1 == t0 else z0 + (z1 - z0) * (t - t0) / (t1 - t0)
        return k[-1][1]


def main():
    OUT.mkdir(exist_ok=True)

    # Single key press with the index finger, 1.0 N commanded.
    tr = Track()
    tr.press(1, 2.0, 0.01, 3.0)
    tr.write(OUT / "press.csv", 8.0)
    json.dump(config("one_per_finger", [ELASTIC], 8.0, "press.csv"),
              open(OUT / "press.json", "w"), indent=2)

    # Five-finger chord, each finger to a different depth (0.6 .. 1.0 N).
    tr = Track()
    for f, depth in enumerate([0.006, 0.010, 0.008, 0.007, 0.009]):
        tr.press(f, 2.0, depth, 3.0)
    tr.write(OUT / "chord.csv", 8.0)
    json.dump(config("one_per_finger", [ELASTIC], 8.0, "chord.csv"),
              open(OUT / "chord.json", "w"), indent=2)

    # Three groups: index 0.6 N and middle 1.0 N share one drone; ring and
    # little share another, little deeper.
    tr = Track()
    tr.press(0, 2.0, 0.008, 3.0)
    tr.press(1, 2.0, 0.006, 3.0)
    tr.press(2, 2.0, 0.010, 3.0)
    tr.press(3, 2.0, 0.005, 3.0)
    tr.press(4, 2.0, 0.009, 3.0)
    tr.write(OUT / "three_groups.csv", 8.0)
    json.dump(config("three_groups", [ELASTIC], 8.0, "three_groups.csv"),
              open(OUT / "three_groups.json", "w"), indent=2)

    # Two leashes on the index finger: elastic and inextensible.
    tr = Track()
    tr.press(1, 2.0, 0.01, 3.0)
    tr.write(OUT / "dual_tether.csv", 8.0)
    json.dump(config("dual_tether", [ELASTIC, INEXTENSIBLE], 8.0, "dual_tether.csv",
                     finger="index", noise=False),
              open(OUT / "dual_tether.json", "w"), indent=2)

    # One minute of playing: a repeating five-note phrase.
    tr = Track()
    melody = [0, 2, 4, 3, 1, 2, 0, 4, 1, 3]
    depths = [0.010, 0.008, 0.009, 0.007, 0.010]
    t = 1.0
    while t < 57.0:
        for f in melody:
            if t >= 57.0:
                break
            tr.press(f, t, depths[f], 0.5)
            t += 1.2
    tr.write(OUT / "piano.csv", 60.0)
    json.dump(config("one_per_finger", [ELASTIC], 60.0, "piano.csv"),
              open(OUT / "piano.json", "w"), indent=2)


if __name__ == "__main__":
    main()
