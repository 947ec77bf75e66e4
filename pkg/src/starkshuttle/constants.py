"""CODATA constants in SI, plus the unit conversions the package uses."""

from scipy import constants as _sc

hbar = _sc.hbar
h = _sc.h
c = _sc.c
e = _sc.e
m_e = _sc.m_e
amu = _sc.physical_constants["atomic mass constant"][0]
a0 = _sc.physical_constants["Bohr radius"][0]
mu_B = _sc.physical_constants["Bohr magneton"][0]
mu_N = _sc.physical_constants["nuclear magneton"][0]

# 1 cm^-1 expressed in joules and in hertz
CM1_TO_J = h * c * 100.0
CM1_TO_HZ = c * 100.0

# line strength in e^2 a0^2 -> C^2 m^2
S_AU_TO_SI = (e * a0) ** 2


def cm1_to_joule(x):
    return x * CM1_TO_J


def hz_to_cm1(x):
    return x / CM1_TO_HZ
