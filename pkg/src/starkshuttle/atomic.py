"""Atomic structure tables and static dipole susceptibilities.

Levels and E1 line strengths come from CSV tables; sublevel matrix elements
follow from the Wigner-Eckart theorem, and the susceptibility of a state is the
sum over intermediate sublevels of ``|<m|x|state>|^2 / (E_state - E_m)``.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import constants as const
from .angular import cg, half_integer, wigner_3j
from .errors import ValidationError

DENOMINATOR_FLOOR_CM1 = 1e-3
MAX_ENERGY_CM1 = 1e6


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class Polarization(str, enum.Enum):
    """Direction of the transport field relative to the quantization axis."""

    PARALLEL = "parallel"
    TRANSVERSE = "transverse"

    def components(self):
        """Spherical components ``(q, c_q)`` with ``x_hat = sum c_q r_q``."""
        if self is Polarization.PARALLEL:
            return ((0, 1.0),)
        s = 1 / math.sqrt(2)
        return ((-1, s), (1, -s))


@dataclass(frozen=True)
class Level:
    label: str
    configuration: str
    term: str
    J: Fraction
    energy_cm1: float

    @property
    def g(self):
        return int(2 * self.J + 1)

    @property
    def energy_joule(self):
        return self.energy_cm1 * const.CM1_TO_J

    def m_values(self):
        return [self.J - k for k in range(self.g)]


@dataclass(frozen=True)
class Line:
    upper: str
    lower: str
    S_au: float


class LevelTable:
    def __init__(self, levels):
        self._levels = {}
        for lv in levels:
            if lv.label in self._levels:
                raise ValidationError(f"duplicate level label {lv.label!r}")
            if not math.isfinite(lv.energy_cm1):
                raise ValidationError(f"level {lv.label!r} has non-finite energy")
            self._levels[lv.label] = lv

    def __getitem__(self, label):
        try:
            return self._levels[label]
        except KeyError:
            raise ValidationError(f"unknown level {label!r}") from None

    def __contains__(self, label):
        return label in self._levels

    def __iter__(self):
        return iter(self._levels.values())

    def __len__(self):
        return len(self._levels)

    def shifted(self, delta_cm1):
        """Same table with every energy moved by ``delta_cm1``."""
        return LevelTable(
            Level(lv.label, lv.configuration, lv.term, lv.J, lv.energy_cm1 + delta_cm1) for lv in self
        )


class LineTable:
    def __init__(self, lines, levels):
        self.lines = []
        seen = set()
        for ln in lines:
            for lab in (ln.upper, ln.lower):
                if lab not in levels:
                    raise ValidationError(f"line references unknown level {lab!r}")
            key = frozenset((ln.upper, ln.lower))
            if len(key) != 2:
                raise ValidationError(f"line connects level {ln.upper!r} to itself")
            if key in seen:
                raise ValidationError(f"duplicate line {ln.upper!r} - {ln.lower!r}")
            if not ln.S_au >= 0:
                raise ValidationError(f"negative line strength for {ln.upper!r} - {ln.lower!r}")
            seen.add(key)
            self.lines.append(ln)

    def __len__(self):
        return len(self.lines)

    def connected(self, label):
        """``[(other_label, S_au, label_is_upper)]`` for every line touching ``label``."""
        out = []
        for ln in self.lines:
            if ln.upper == label:
                out.append((ln.lower, ln.S_au, True))
            elif ln.lower == label:
                out.append((ln.upper, ln.S_au, False))
        return out

    def strength(self, a, b):
        for ln in self.lines:
            if {ln.upper, ln.lower} == {a, b}:
                return ln.S_au
        return 0.0


def _rows(text):
    """Yield ``(line_number, row)`` from CSV text, skipping comments and blanks."""
    body = []
    for n, raw in enumerate(io.StringIO(text), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        body.append((n, raw))
    if not body:
        return
    reader = csv.reader([r for _, r in body])
    header = [h.strip() for h in next(reader)]
    for (n, _), row in zip(body[1:], reader):
        row = [c.strip() for c in row]
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", n)
        yield n, header, dict(zip(header, row))


def _parse_J(text, line):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot read J={text!r}", line) from None
    if value < 0 or (2 * value).denominator != 1:
        raise ParseError(f"J={text} is not a non-negative half-integer", line)
    return value


def parse_levels(text, *, energy_unit="cm-1"):
    """Parse ``label,configuration,term,J,energy_cm1`` CSV into a :class:`LevelTable`.

    ``energy_unit="J"`` reads the energy column in joules instead.
    """
    levels = []
    seen = {}
    required = ["label", "configuration", "term", "J", "energy_cm1"]
    for n, header, row in _rows(text):
        missing = [k for k in required if k not in header]
        if missing:
            raise ParseError(f"missing columns {missing}", n)
        try:
            energy = float(row["energy_cm1"])
        except ValueError:
            raise ParseError(f"cannot read energy {row['energy_cm1']!r}", n) from None
        if energy_unit == "J":
            energy = energy / const.CM1_TO_J
        elif energy_unit != "cm-1":
            raise ValidationError(f"unknown energy unit {energy_unit!r}")
        if not math.isfinite(energy) or abs(energy) >= MAX_ENERGY_CM1:
            raise ParseError(f"energy {energy} cm^-1 fails the unit sanity check (< 1e6 cm^-1)", n)
        label = row["label"]
        if not label:
            raise ParseError("empty label", n)
        if label in seen:
            raise ParseError(f"duplicate label {label!r} (first on line {seen[label]})", n)
        seen[label] = n
        levels.append(Level(label, row["configuration"], row["term"], _parse_J(row["J"], n), energy))
    return LevelTable(levels)


def parse_lines(text, levels):
    """Parse ``upper,lower,S_au`` CSV; labels must resolve in ``levels``."""
    lines = []
    for n, header, row in _rows(text):
        missing = [k for k in ("upper", "lower", "S_au") if k not in header]
        if missing:
            raise ParseError(f"missing columns {missing}", n)
        try:
            S = float(row["S_au"])
        except ValueError:
            raise ParseError(f"cannot read line strength {row['S_au']!r}", n) from None
        if not (S >= 0 and math.isfinite(S)):
            raise ParseError(f"line strength must be finite and non-negative, got {S}", n)
        for key in ("upper", "lower"):
            if row[key] not in levels:
                raise ParseError(f"unknown level {row[key]!r}", n)
        lines.append(Line(row["upper"], row["lower"], S))
    try:
        return LineTable(lines, levels)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


@dataclass(frozen=True, eq=False)
class AtomicModel:
    name: str
    levels: LevelTable
    lines: LineTable
    checksums: dict = field(default_factory=dict)

    def with_levels(self, levels):
        return AtomicModel(self.name, levels, LineTable(self.lines.lines, levels), self.checksums)


BUNDLED = {
    "ca_ii": ("ca_ii_levels.csv", "ca_ii_lines.csv"),
    "be_ii": ("be_ii_levels.csv", "be_ii_lines.csv"),
}


def data_dir():
    """Bundled data location, overridable with ``STARK_DATA_DIR``."""
    env = os.environ.get("STARK_DATA_DIR")
    if env:
        return Path(env)
    return Path(str(resources.files("starkshuttle") / "data"))


def load_model(name, directory=None):
    """Load a bundled (or ``directory``-supplied) model such as ``"ca_ii"``."""
    try:
        lev_file, line_file = BUNDLED[name]
    except KeyError:
        raise ValidationError(f"unknown atomic model {name!r}; known: {sorted(BUNDLED)}") from None
    base = Path(directory) if directory is not None else data_dir()
    texts = {}
    for fname in (lev_file, line_file):
        path = base / fname
        if not path.is_file():
            raise ValidationError(f"atomic data file not found: {path}")
        texts[fname] = path.read_bytes()
    levels = parse_levels(texts[lev_file].decode("utf-8"))
    lines = parse_lines(texts[line_file].decode("utf-8"), levels)
    sums = {k: hashlib.sha256(v).hexdigest() for k, v in texts.items()}
    return AtomicModel(name, levels, lines, sums)


# states and matrix elements


@dataclass(frozen=True)
class StateTerm:
    """One product component ``amplitude |J, mj>|I, mi>``; ``mi`` is a spectator."""

    amplitude: complex
    mj: Fraction
    mi: Optional[Fraction] = None


@dataclass(frozen=True)
class StateDecomposition:
    level: str
    terms: tuple
    energy_offset_hz: float = 0.0
    name: str = ""

    def __post_init__(self):
        norm = sum(abs(t.amplitude) ** 2 for t in self.terms)
        if not self.terms or abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"state {self.name or self.level!r} is not normalised (sum |A|^2 = {norm!r})")

    @classmethod
    def single(cls, level, mj, energy_offset_hz=0.0, name=""):
        return cls(level, (StateTerm(1.0, half_integer(mj)),), energy_offset_hz, name)

    def with_offset(self, energy_offset_hz):
        return StateDecomposition(self.level, self.terms, energy_offset_hz, self.name)

    @property
    def offset_cm1(self):
        return const.hz_to_cm1(self.energy_offset_hz)


def reduced_matrix_sq(S_au, g_k):
    """``|<k||Q1||l>|^2`` in m^2 from a line strength in e^2 a0^2 and the degeneracy of ``k``."""
    if S_au < 0 or g_k < 1:
        raise ValidationError("need S >= 0 and g_k >= 1")
    return S_au * const.S_AU_TO_SI / (const.e**2 * g_k)


def sublevel_element(Ja, Ma, Jb, Mb, q, reduced):
    """``<Ja Ma| r_q |Jb Mb>`` from the reduced element ``<a||r||b>`` (Wigner-Eckart)."""
    phase = Ja - Ma
    sign = -1.0 if int(phase) % 2 else 1.0
    return sign * wigner_3j(Ja, 1, Jb, -Ma, q, Mb) * reduced


def _reduced(model, a, b):
    """Signed ``<a||r||b>`` in metres; ``<upper||r||lower> = a0 sqrt(S)``."""
    for other, S, a_is_upper in model.lines.connected(a):
        if other == b:
            r = const.a0 * math.sqrt(S)
            if a_is_upper:
                return r
            Ja, Jb = model.levels[a].J, model.levels[b].J
            return r * (-1.0 if int(Ja - Jb) % 2 else 1.0)
    return 0.0


def couplings(state, level_l, model, polarization=Polarization.TRANSVERSE):
    """Amplitudes ``<l M', mi| x |state>`` in metres, keyed by ``(M', mi)``."""
    polarization = Polarization(polarization)
    k = model.levels[state.level]
    l = model.levels[level_l]
    red = _reduced(model, level_l, state.level)
    out = {}
    if red == 0.0:
        return out
    for term in state.terms:
        for q, cq in polarization.components():
            Mp = term.mj + q
            if abs(Mp) > l.J:
                continue
            amp = term.amplitude * cq * sublevel_element(l.J, Mp, k.J, term.mj, q, red)
            key = (Mp, term.mi)
            out[key] = out.get(key, 0.0) + amp
    return out


def matrix_element_sq_sum(state, level_l, model, polarization=Polarization.TRANSVERSE):
    """``sum_{m in l} |<m|x|state>|^2`` in m^2."""
    return float(sum(abs(a) ** 2 for a in couplings(state, level_l, model, polarization).values()))


@dataclass(frozen=True)
class Susceptibility:
    chi: float
    per_level: dict


def _denominator(state, level_l, model):
    k = model.levels[state.level]
    l = model.levels[level_l]
    gap = k.energy_cm1 + state.offset_cm1 - l.energy_cm1
    if abs(gap) < DENOMINATOR_FLOOR_CM1:
        raise ValidationError(
            f"degenerate denominator between {state.level!r} and {level_l!r}: {gap:.3g} cm^-1"
        )
    return gap * const.CM1_TO_J


def susceptibility(state, model, polarization=Polarization.TRANSVERSE):
    """``sum_m |<m|x|state>|^2 / (E_state - E_m)`` in m^2/J, with per-level parts.

    ``E_state`` includes the state's energy offset; intermediate levels sit at
    their centroid energies.
    """
    per_level = {}
    for other, _, _ in model.lines.connected(state.level):
        sq = matrix_element_sq_sum(state, other, model, polarization)
        if sq == 0.0:
            continue
        per_level[other] = sq / _denominator(state, other, model)
    return Susceptibility(float(sum(per_level.values())), per_level)


def susceptibility_derivative(state, model, polarization=Polarization.TRANSVERSE):
    """``d chi / d offset`` in (m^2/J)/Hz."""
    total = 0.0
    for other, _, _ in model.lines.connected(state.level):
        sq = matrix_element_sq_sum(state, other, model, polarization)
        if sq:
            total -= sq / _denominator(state, other, model) ** 2 * const.h
    return total


def sublevel_basis(model, level, spectators=(None,)):
    """All ``(level, M, mi)`` tuples for a level, with the given spectator values."""
    lv = model.levels[level]
    return [(level, M, mi) for mi in spectators for M in lv.m_values()]


def position_element(model, bra, ket, polarization=Polarization.TRANSVERSE):
    """``<bra| x |ket>`` in metres between ``(level, M, mi)`` sublevels."""
    polarization = Polarization(polarization)
    la, Ma, mia = bra
    lb, Mb, mib = ket
    if mia != mib:
        return 0.0
    red = _reduced(model, la, lb)
    if red == 0.0:
        return 0.0
    Ja, Jb = model.levels[la].J, model.levels[lb].J
    return sum(cq * sublevel_element(Ja, Ma, Jb, Mb, q, red) for q, cq in polarization.components() if Ma == Mb + q)


# ground-state hyperfine structure


def ground_hyperfine(I, A_hz, g_J, g_I, B_tesla, J=Fraction(1, 2)):
    """Eigenstates of ``A I.J + mu_B B (g_J J_z + g_I I_z)`` labelled by zero-field ``(F, mF)``.

    Returns ``{(F, mF): (energy_hz, {(mi, mj): amplitude})}`` with energies
    relative to the hyperfine centroid.
    """
    I = half_integer(I)
    J = half_integer(J)
    mis = [I - k for k in range(int(2 * I + 1))]
    mjs = [J - k for k in range(int(2 * J + 1))]
    basis = [(mi, mj) for mi in mis for mj in mjs]
    idx = {b: n for n, b in enumerate(basis)}
    H = np.zeros((len(basis), len(basis)))
    zee = const.mu_B * B_tesla / const.h
    for (mi, mj), n in idx.items():
        H[n, n] = A_hz * float(mi * mj) + zee * (g_J * float(mj) + g_I * float(mi))
        # (A/2)(I+ J- + I- J+)
        for dmi, dmj in ((1, -1), (-1, 1)):
            target = (mi + dmi, mj + dmj)
            if target in idx:
                a = math.sqrt(float(I * (I + 1) - mi * (mi + dmi)))
                b = math.sqrt(float(J * (J + 1) - mj * (mj + dmj)))
                H[idx[target], n] += 0.5 * A_hz * a * b
    energies, vecs = np.linalg.eigh(H)
    Fs = [abs(I - J) + k for k in range(int(2 * min(I, J)) + 1)]
    zero_field = {}
    for F in Fs:
        for mF in [F - k for k in range(int(2 * F + 1))]:
            v = np.zeros(len(basis))
            for (mi, mj), n in idx.items():
                v[n] = cg(I, mi, J, mj, F, mF)
            zero_field[(F, mF)] = v
    out = {}
    used = set()
    for label, ref in zero_field.items():
        overlaps = np.abs(vecs.T @ ref)
        order = np.argsort(-overlaps)
        col = next(c for c in order if c not in used)
        used.add(col)
        vec = vecs[:, col] * np.sign(vecs[:, col] @ ref or 1.0)
        amps = {basis[n]: float(vec[n]) for n in range(len(basis)) if abs(vec[n]) > 1e-15}
        out[label] = (float(energies[col]), amps)
    return out
