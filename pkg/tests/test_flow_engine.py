"""Time integration, run orchestration and parabolic rescaling.

Oracles: exact sphere stationarity, the degree-2 linear decay rate 144,
self-refinement in dt, and conservation/dissipation identities checked
on recorded trajectories.
"""

import numpy as np
import pytest

from triheat import diagnostics, flow, mesh, radial, shapes
from triheat.mesh import TriangleMesh
from triheat.spherical import GridSpec

L = 16
GRID = GridSpec.for_bandlimit(L)


def mode_state(radius, modes):
    return shapes.perturbed_sphere_state(GRID, radius, modes)


# ---------------------------------------------------------------------------
# step size policy
# ---------------------------------------------------------------------------


def test_auto_dt_scales_with_sixth_power():
    s1 = shapes.sphere_state(GRID, 1.0)
    s2 = shapes.sphere_state(GRID, 2.0)
    assert flow.auto_dt(s2) == 64.0 * flow.auto_dt(s1)
    m = shapes.icosphere(2)
    big = TriangleMesh(2.0 * m.vertices, m.faces)
    assert flow.auto_dt(big) == 64.0 * flow.auto_dt(m)


def test_steppers_reject_bad_dt():
    s = shapes.sphere_state(GRID, 1.0)
    with pytest.raises(ValueError):
        flow.step_spectral(s, 0.0)
    with pytest.raises(ValueError):
        flow.step_mesh(shapes.icosphere(1), -1e-6)
    with pytest.raises(TypeError):
        flow.auto_dt(np.zeros(3))


# ---------------------------------------------------------------------------
# spectral stepper
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("dt", [1e-6, 1e-3, 1.0])
def test_sphere_is_a_fixed_point(dt):
    s = shapes.sphere_state(GRID, 1.3)
    out = flow.step_spectral(s, dt)
    assert np.abs(out.coeffs - s.coeffs).max() <= 1e-12
    assert out.time == s.time + dt


def test_mode_decay_approaches_exponential():
    """The per-step multiplier of the (2,0) amplitude tends to
    exp(-144 dt); the defect is second order in dt."""
    st = mode_state(1.0, [(2, 0, 1e-3)])
    defects = []
    for dt in (1e-5, 5e-6, 2.5e-6):
        out = flow.step_spectral(st, dt)
        mult = out.coeffs[2, L] / st.coeffs[2, L]
        defect = abs(mult - np.exp(-144.0 * dt))
        assert defect <= 3e-3 * (1.0 - np.exp(-144.0 * dt))
        defects.append(defect)
    assert defects[0] > defects[1] > defects[2]


def test_convergence_order_against_fine_reference():
    st = mode_state(1.0, [(2, 0, 1e-3)])
    T = 1e-4
    ref = st
    for _ in range(2000):
        ref = flow.step_spectral(ref, T / 2000)
    errs = []
    for n in (50, 100, 200):
        cur = st
        for _ in range(n):
            cur = flow.step_spectral(cur, T / n)
        errs.append(np.abs(cur.coeffs - ref.coeffs).max())
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / errs[1] >= 1.9
    assert errs[0] / errs[2] >= 4.0


# ---------------------------------------------------------------------------
# mesh stepper
# ---------------------------------------------------------------------------


def test_step_displacement_shrinks_under_refinement():
    """Spheres are stationary, so the per-step motion is pure
    discretization residual and must fall with resolution."""
    disp = []
    for n in (3, 4):
        m = shapes.icosphere(n)
        out = flow.step_mesh(m, flow.auto_dt(m))
        disp.append(np.linalg.norm(out.vertices - m.vertices, axis=1).max())
    assert disp[0] / disp[1] >= 1.5


def test_volume_drift_per_step():
    m = shapes.icosphere(5)
    out = flow.step_mesh(m, flow.auto_dt(m))
    v0 = mesh.signed_volume(m)
    assert abs(mesh.signed_volume(out) / v0 - 1.0) <= 1e-6


def test_perturbed_mesh_run_accepts_policy_dt():
    m = shapes.perturbed_sphere_mesh(4, 1.0, [(2, 0, 0.05)])
    dt = flow.auto_dt(m)
    traj = flow.run(m, m.time + 30.5 * dt, cadence=10)
    assert traj.stop_reason == "t_end"
    assert traj.meta["halvings"] == 0
    vols = [r.volume for r in traj.records]
    assert max(abs(v / vols[0] - 1.0) for v in vols) <= 1e-3
    areas = [r.area for r in traj.records]
    assert all(b <= a for a, b in zip(areas, areas[1:]))


# ---------------------------------------------------------------------------
# run orchestration
# ---------------------------------------------------------------------------


def test_run_rejects_bad_configuration():
    s = shapes.sphere_state(GRID, 1.0)
    with pytest.raises(ValueError):
        flow.run(s, 0.0)
    with pytest.raises(ValueError):
        flow.run(s, 1.0, cadence=0)
    with pytest.raises(ValueError):
        flow.run(s, 1.0, dt=-1e-5)
    with pytest.raises(TypeError):
        flow.run("not a state", 1.0)


def test_sphere_run_converges_immediately():
    s = shapes.sphere_state(GRID, 1.3)
    traj = flow.run(s, 1.0)
    assert traj.stop_reason == "converged"
    assert len(traj.entries) == 1
    rstar = (3.0 * radial.volume(s) / (4.0 * np.pi)) ** (1.0 / 3.0)
    assert abs(traj.final_state.mean_radius() - rstar) <= 1e-10
    assert traj.meta["backend"] == "spectral"


def test_perturbed_run_converges_to_a_sphere():
    st = mode_state(1.0, [(2, 0, 1e-2)])
    traj = flow.run(st, 1.0, stop_ao_inf=1e-7, cadence=50)
    assert traj.stop_reason == "converged"
    fin = traj.final_state
    assert np.abs(fin.values - fin.mean_radius()).max() <= 1e-6
    areas = [r.area for r in traj.records]
    assert all(b <= a for a, b in zip(areas, areas[1:]))
    t = traj.times()
    assert np.all(np.diff(t) > 0.0)


def test_two_mode_run_dissipates_tracefree_energy():
    st = mode_state(1.0, [(2, 0, 1e-2), (3, 2, 1e-2)])
    traj = flow.run(st, 0.02, cadence=40)
    assert traj.stop_reason == "t_end"
    assert abs(traj.times()[-1] - 0.02) <= 1e-12
    ao2 = [r.ao2 for r in traj.records]
    assert all(b < a for a, b in zip(ao2, ao2[1:]))
    # quarter Willmore energy stays below the embeddedness bound
    assert max(0.25 * r.willmore for r in traj.records) < 8.0 * np.pi


def test_spectral_volume_conservation_rate():
    # near-sphere regime: the explicit nonlinear remainder carries the
    # volume error, which scales like amplitude^2 times dt
    st = mode_state(1.0, [(2, 0, 1e-4)])
    traj = flow.run(st, 0.01, cadence=50)
    vols = [r.volume for r in traj.records]
    tspan = traj.times()[-1] - traj.times()[0]
    drift = max(abs(v / vols[0] - 1.0) for v in vols)
    assert drift / tspan <= 1e-8


def test_area_derivative_matches_dissipation_integral():
    """Between records, (A(t2) - A(t1))/(t2 - t1) must equal the
    trapezoid average of -int |Delta H|^2 d mu within 1%."""
    st = mode_state(1.0, [(2, 0, 1e-3)])
    traj = flow.run(st, 0.002, safety=0.5, cadence=16)
    recs = traj.records
    ts = traj.times()
    assert len(recs) >= 4
    for a, b, t1, t2 in zip(recs, recs[1:], ts, ts[1:]):
        lhs = (b.area - a.area) / (t2 - t1)
        rhs = 0.5 * (a.dh2 + b.dh2)
        assert abs(lhs + rhs) <= 0.01 * rhs


def test_mesh_run_reports_singular_when_dt_cannot_recover():
    m = shapes.perturbed_sphere_mesh(3, 1.0, [(2, 0, 0.3)])
    traj = flow.run(m, m.time + 2e5, dt=1e5, cadence=1)
    assert traj.stop_reason == "singular"
    assert traj.meta["halvings"] == flow._MAX_HALVINGS + 1
    # the last valid state and its concentration are preserved
    assert len(traj.entries) >= 1
    assert traj.records[-1].alpha > 0.0
    traj.final_state.validate()


# ---------------------------------------------------------------------------
# parabolic rescaling
# ---------------------------------------------------------------------------


def test_rescale_spectral_invariants():
    st = mode_state(1.0, [(2, 0, 0.1)])
    e0 = diagnostics.energies(st)
    r = flow.rescale(st, 2.0)
    e2 = diagnostics.energies(r)
    int_a0 = e0["ao2"] + 2.0 * e0["willmore"]
    int_a2 = e2["ao2"] + 2.0 * e2["willmore"]
    assert abs(int_a2 / int_a0 - 1.0) <= 1e-12
    assert abs(e2["area"] / (e0["area"] / 4.0) - 1.0) <= 1e-12
    assert abs(e2["volume"] / (e0["volume"] / 8.0) - 1.0) <= 1e-12


def test_rescale_time_and_inverse():
    st = flow.step_spectral(mode_state(1.0, [(2, 0, 0.1)]), 1e-5)
    r = flow.rescale(st, 2.0)
    assert r.time == st.time / 64.0
    back = flow.rescale(r, 0.5)
    assert np.abs(back.coeffs - st.coeffs).max() <= 1e-12
    assert abs(back.time - st.time) <= 1e-25


def test_rescale_mesh_about_a_point():
    m = shapes.perturbed_sphere_mesh(3, 1.0, [(2, 0, 0.1)])
    e0 = diagnostics.energies(m)
    r = flow.rescale(m, 2.0, center=(0.3, -0.2, 0.1))
    e2 = diagnostics.energies(r)
    int_a0 = e0["ao2"] + 2.0 * e0["willmore"]
    int_a2 = e2["ao2"] + 2.0 * e2["willmore"]
    assert abs(int_a2 / int_a0 - 1.0) <= 1e-12
    assert abs(e2["area"] / (e0["area"] / 4.0) - 1.0) <= 1e-12
    assert abs(e2["volume"] / (e0["volume"] / 8.0) - 1.0) <= 1e-12


def test_rescale_rejects_off_center_graphs_and_bad_factor():
    st = shapes.sphere_state(GRID, 1.0)
    with pytest.raises(ValueError, match="origin"):
        flow.rescale(st, 2.0, center=(0.1, 0.0, 0.0))
    flow.rescale(st, 2.0, center=(0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        flow.rescale(st, 0.0)
