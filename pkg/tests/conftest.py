import pytest

from dickespec.liouvillian import build_liouvillian, spectrum
from dickespec.operators import ModelParams
from support import STRONG_DRIVE, STRONG_DRIVE_DETUNINGS


@pytest.fixture(scope="session")
def strong_drive_spectrum():
    params = ModelParams(
        atom_count=4, drive=STRONG_DRIVE, detunings=STRONG_DRIVE_DETUNINGS
    )
    return spectrum(build_liouvillian(params))


@pytest.fixture(scope="session")
def dipole_spectra():
    """Spectra at drive 200 with the dipole term, keyed by boundary."""
    out = {}
    for boundary in ("periodic", "open"):
        params = ModelParams(
            atom_count=4,
            drive=STRONG_DRIVE,
            detunings=STRONG_DRIVE_DETUNINGS,
            dd_strength=1.0,
            boundary=boundary,
        )
        out[boundary] = spectrum(build_liouvillian(params))
    return out


@pytest.fixture(scope="session")
def clean_dipole_spectra():
    """Same dipole geometries without disorder: the exactly symmetric limit."""
    out = {}
    for boundary in ("periodic", "open"):
        params = ModelParams(
            atom_count=4,
            drive=STRONG_DRIVE,
            detunings=(0.0,) * 4,
            dd_strength=1.0,
            boundary=boundary,
        )
        out[boundary] = spectrum(build_liouvillian(params))
    return out
