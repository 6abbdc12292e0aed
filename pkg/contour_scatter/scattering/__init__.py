"""Scattering observables: far-field maps, ionization amplitudes and spectra."""
