import numpy as np
import pytest

from floqion import atoms, basis


@pytest.fixture(scope="session")
def rb_fine():
    """Converged structure basis shared across structure tests."""
    return basis.build_basis(rmax=120.0, k=6, n_breakpoints=240, spacing_rule="power:1.7")


@pytest.fixture(scope="session")
def rb_fine_ecs():
    return basis.build_basis(rmax=120.0, k=6, n_breakpoints=240, spacing_rule="power:1.7",
                             ecs=basis.default_ecs(120.0))


@pytest.fixture(scope="session")
def hydrogen():
    return atoms.get_model("hydrogen")


@pytest.fixture(scope="session")
def h_states(rb_fine, hydrogen):
    return {
        "1s": atoms.bound_states(hydrogen, rb_fine, 0, 1).by_label("1s"),
        "2p": atoms.bound_states(hydrogen, rb_fine, 1, 1).by_label("2p"),
    }
