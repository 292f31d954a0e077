"""Exit criteria, each at its pinned tolerance."""

import math

import numpy as np
import pytest

from weakvalue.cli import main
from weakvalue.hom import default_pair, relative_grid, symmetric_angle_report, visibility_sweep
from weakvalue.optics import (
    delta_theta,
    restoration_hwp_angle,
    run_interferometer,
    shift_angle_exact,
    strength_from_G,
    two_path_selection,
)
from weakvalue.prepost import abl_probability, three_box_scenario, weak_value
from weakvalue.qcore import basis_projector
from weakvalue.weakmeas import (
    conditional_prob_V,
    fit_weak_value,
    readout,
    readout_closed_form,
    readout_curve,
    synthesize_sweep,
)

acceptance = pytest.mark.acceptance

WEAK_VALUES = (-0.27, -0.57, -0.87, -1.14)
FIT_G = [round(0.1 * k, 10) for k in range(1, 10)]
SHIFT_C = 0.5  # frozen bound for |shift - p_A G| / G², measured max 0.451


@acceptance(1, "three-box weak values (1, 1, -1) and ABL (1, 1) within 1e-12")
def test_three_box():
    pp, (pa, pb, pc) = three_box_scenario()
    values = [weak_value(pp, p).value for p in (pa, pb, pc)]
    for v, expected in zip(values, (1, 1, -1)):
        assert abs(v - expected) <= 1e-12
    assert abs(abl_probability(pp, pa) - 1) <= 1e-12
    assert abs(abl_probability(pp, pb) - 1) <= 1e-12


@acceptance(2, "theta = 36.57 deg and delta theta = 16.86 deg at G = 0.29, within 0.01 deg")
def test_geometry():
    s = strength_from_G(0.29)
    assert abs(math.degrees(s.theta) - 36.57) <= 0.01
    assert abs(math.degrees(delta_theta(s)) - 16.86) <= 0.01


@acceptance(3, "restoration HWP angle for p_A = 1 is 45 deg within 1e-9 deg")
def test_restoration_certain_path():
    s = strength_from_G(0.29)
    chi = restoration_hwp_angle(run_interferometer(1.0, s), s.theta)
    assert abs(math.degrees(chi) - 45.0) <= 1e-9


@acceptance(4, "readout equals ABL at G = 1 (1e-12) and the weak value at G = 1e-3")
def test_readout_limits():
    rng = np.random.default_rng(4)
    projector_a = basis_projector("AB", "A")
    for p in rng.uniform(-2, 2, 100):
        abl = abl_probability(two_path_selection(p), projector_a)
        assert abs(readout(conditional_prob_V(p, 1.0), 1.0) - abl) <= 1e-12
        weak = readout(conditional_prob_V(p, 1e-3), 1e-3)
        assert abs(weak - p) < 1e-5 * (1 + p * p)


@acceptance(5, "closed-form shift and readout match the tensor-product simulation on 41x20 grid")
def test_oracle_equivalence():
    for p in np.linspace(-2, 2, 41):
        for G in np.linspace(0.99 / 20, 0.99, 20):
            run = run_interferometer(p, G)
            assert abs(shift_angle_exact(p, G) - run.shift) <= 1e-12
            simulated = readout(abs(run.output_polarization.amplitude("V")) ** 2, G)
            assert abs(readout_closed_form(p, G) - simulated) <= 1e-12


@acceptance(6, "|shift_exact - p_A G| <= C G^2 with C = 0.5 for |p_A| <= 2, G <= 0.1")
def test_shift_approximation():
    for p in np.linspace(-2, 2, 81):
        for G in np.linspace(1e-4, 0.1, 100):
            assert abs(shift_angle_exact(p, G) - p * G) <= SHIFT_C * G * G


@acceptance(7, "counterpart symmetry at G = 0.01 and the three HWP5 marks at G = 0.29")
def test_counterpart_symmetry():
    s = strength_from_G(0.01)
    plus = symmetric_angle_report(1.0, s).exact - s.theta
    minus = symmetric_angle_report(-1.0, s).exact - s.theta
    assert abs(plus + minus) < 1e-3
    marks = symmetric_angle_report(-1.0, strength_from_G(0.29))
    got = [math.degrees(x) for x in (marks.exact, marks.paper_symmetric, marks.small_G_mark)]
    for value, expected in zip(got, (28.80, 28.14, 28.26)):
        assert abs(value - expected) <= 0.02


@acceptance(8, "HOM sweep peaks reach 1 - 1e-5 and shift monotonically with p_A")
def test_hom_sweep():
    s = strength_from_G(0.29)
    grid = relative_grid(s, step=math.radians(0.05))
    argmax = []
    for p in (0.0, *WEAK_VALUES):
        sweep = visibility_sweep(default_pair(p, s), grid)
        assert sweep.max_visibility >= 1 - 1e-5
        argmax.append(sweep.argmax_angle)
    assert all(b < a for a, b in zip(argmax, argmax[1:]))


@acceptance(9, "fits recover p_A: noiseless within 1e-6, 1e5-trial counts within 3 SE")
def test_fit_recovery():
    for k, p in enumerate(WEAK_VALUES):
        fit = fit_weak_value(readout_curve(p, FIT_G).points)
        assert abs(fit.p_A - p) <= 1e-6
        noisy = fit_weak_value(synthesize_sweep(p, FIT_G, 100_000, seed=1000 + k))
        assert abs(noisy.p_A - p) <= 3 * noisy.stderr


@acceptance(10, "background noise biases the fitted weak value toward zero (p_A = -1.14)")
def test_noise_bias():
    p, rate = -1.14, 0.01
    # background per failed trial: noise/signal = rate (1 - q) / q, growing as q drops
    q = [run_interferometer(p, G).postselect_prob for G in FIT_G]
    ratios = [rate * (1 - x) / x for x in q]
    assert min(ratios) > rate * (1 - 0.5) / 0.5
    fit = fit_weak_value(synthesize_sweep(p, FIT_G, 100_000, seed=10, background_rate=rate))
    assert abs(fit.p_A) < abs(p)


@acceptance(11, "identical CLI configs give byte-identical CSV")
def test_determinism(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = readout-sweep\np_A = -1.14\nG = 0.1:0.9:0.1\ntrials = 20000\nseed = 7\nbackground = 0.01\n")
    hom_cfg = tmp_path / "hom.cfg"
    hom_cfg.write_text("command = hom-sweep\np_A = -0.27,-0.57,-0.87,-1.14\nG = 0.29\nkappa = 0.01\n")
    for conf in (cfg, hom_cfg):
        outputs = []
        for k in range(2):
            out = tmp_path / f"{conf.stem}{k}.csv"
            assert main(["--config", str(conf), "--output", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
