"""Smoke test for the pa_urn extension module."""

import math

import pa_urn


def main():
    sched = pa_urn.Schedule.figure_one()
    zero = pa_urn.InitialProfile.zero()
    assert sched.breakpoints()

    traj = pa_urn.simulate(200, 4, sched, zero, seed=1, seed_config=[2])
    assert len(traj) == 201

    hist = pa_urn.terminal_histogram(20, 2, sched, zero, samples=500, seed=3, seed_config=[2])
    assert sum(hist.values()) == 500

    grid = [i / 100 for i in range(101)]
    sol = pa_urn.solve_lln(10, sched, zero, grid)
    assert sol.mass_error() < 1e-8
    num = pa_urn.solve_lln(10, sched, zero, grid, method="numeric")
    assert max(abs(a - b) for a, b in zip(sol.values[-1], num.values[-1])) < 1e-6

    ln2 = math.log(2.0)
    homog = pa_urn.Schedule.homogeneous(0.0, 1.0)
    star = pa_urn.preset_path("star", 8, homog, zero)
    r = pa_urn.path_rate(star, homog, zero)
    assert abs(r["value"] - ln2) < 1e-9, r
    assert pa_urn.classical_rate([0.0, 1.0])["value"] == math.inf
    assert abs(pa_urn.classical_rate([1.0])["value"] - ln2) < 1e-12

    emp = pa_urn.empirical_rate("star", [4, 8, 12], 1, homog, [2])
    for pt in emp["points"]:
        assert abs(pt["probability"] - 2.0 ** -pt["n"]) < 1e-15, pt

    try:
        pa_urn.preset_path("bogus", 3, homog, zero)
    except ValueError:
        pass
    else:
        raise AssertionError("bad preset accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
