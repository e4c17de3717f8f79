import numpy as np
import pytest

from dkglab.dirac import SpinorField, projection_residual
from dkglab.errors import ConfigurationError
from dkglab.gevrey import make_datum
from dkglab.grid import FourierGrid, inverse_transform
from dkglab.solver import (
    SolverConfig,
    charge,
    evolve,
    picard_evolve,
    reconstruct,
    split_initial_data,
)


def small_state(n=16, amplitude=0.5, seed=7, sigma=0.3):
    g = FourierGrid(n)
    fields = [
        make_datum(g, "exp_decay", sigma=sigma, amplitude=amplitude, seed=seed + k)
        for k in range(4)
    ]
    psi0 = SpinorField(fields[0], fields[1])
    return split_initial_data(psi0, fields[2], fields[3])


def test_split_projections_and_reconstruction():
    st = small_state()
    assert projection_residual(st.psi_plus, "+") < 1e-12
    assert projection_residual(st.psi_minus, "-") < 1e-12
    # reconstruction returns the original psi and a real phi
    g = st.grid
    fields = [
        make_datum(g, "exp_decay", sigma=0.3, amplitude=0.5, seed=7 + k)
        for k in range(4)
    ]
    psi, phi, phi_t = reconstruct(st)
    assert np.abs(psi.c1.coeffs + 0 - (fields[0].coeffs)).max() < 1e-11
    assert np.abs(psi.c2.coeffs - fields[1].coeffs).max() < 1e-11
    assert np.abs(phi.coeffs - fields[2].coeffs).max() < 1e-11
    assert np.abs(phi_t.coeffs - fields[3].coeffs).max() < 1e-11
    assert np.abs(inverse_transform(phi).imag).max() < 1e-11


def test_charge_conservation_roundoff():
    st = small_state(amplitude=1.0)
    cfg = SolverConfig(dt=2e-3, t_end=0.2, mass=1.0, record_every=10)
    traj = evolve(st, cfg)
    charges = traj.series("charge")
    drift = np.abs(charges - charges[0]).max() / charges[0]
    assert drift < 1e-11


def test_linear_flow_preserves_weighted_norms():
    st = small_state(amplitude=1.0)
    cfg = SolverConfig(
        dt=2e-3, t_end=0.2, mass=1.0, record_every=10,
        sigma_list=(0.0, 0.1, 0.2), nonlinear=False,
    )
    traj = evolve(st, cfg)
    for sigma in (0.0, 0.1, 0.2):
        m = traj.series("m_sigma", sigma=sigma)
        n = traj.series("n_sigma", sigma=sigma)
        assert np.abs(m - m[0]).max() <= 1e-12 * max(m[0], 1.0)
        assert np.abs(n - n[0]).max() <= 1e-12 * max(n[0], 1.0)


def test_lawson_fourth_order_convergence():
    st = small_state(amplitude=1.0)
    errs = []
    ref = evolve(st.copy(), SolverConfig(dt=1.25e-4, t_end=0.1, store_states=True))
    ref_arrays = list(ref.samples[-1].state.arrays())
    for dt in (2e-3, 1e-3):
        traj = evolve(st.copy(), SolverConfig(dt=dt, t_end=0.1, store_states=True))
        arrs = list(traj.samples[-1].state.arrays())
        errs.append(
            max(np.abs(a - b).max() for a, b in zip(arrs, ref_arrays))
        )
    order = np.log2(errs[0] / errs[1])
    assert order > 3.5


def test_picard_oracle_agreement():
    st = small_state(amplitude=0.5)
    final = picard_evolve(st.copy(), 0.1, 1.0)
    cfg = SolverConfig(dt=1e-3, t_end=0.1, store_states=True)
    traj = evolve(st.copy(), cfg)
    lawson = traj.samples[-1].state
    err = max(
        (a - b).l2_norm()
        for a, b in zip(lawson.fields(), final.fields())
    )
    assert err < 1e-8


def test_picard_oracle_restrictions():
    st = small_state(n=64)
    with pytest.raises(ConfigurationError):
        picard_evolve(st, 0.1, 1.0)
    st = small_state(n=16)
    with pytest.raises(ConfigurationError):
        picard_evolve(st, 2.0, 1.0)


def test_charge_matches_spinor_l2():
    st = small_state()
    psi, _, _ = reconstruct(st)
    direct = psi.c1.l2_norm() ** 2 + psi.c2.l2_norm() ** 2
    assert abs(charge(st) - direct) < 1e-12 * direct
