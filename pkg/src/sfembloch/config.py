"""
Run configuration: a sectioned key-value (INI) file.

    [material aluminum]
    E = 7.31e10
    nu = 0.325
    rho = 2770

    [cell]
    layout = homogeneous        ; homogeneous | bilayer | inclusion | pore
    material = aluminum         ; homogeneous
    bottom = aluminum           ; bilayer (y < 0)
    top = brass                 ; bilayer (y > 0)
    matrix = aluminum           ; inclusion, pore
    inclusion = brass           ; inclusion
    side_fraction = 0.5         ; inclusion, pore
    d_a = 1.0                   ; half-width, m
    d_b = 1.0                   ; half-height, m

    [discretization]
    element = 8                 ; nodes per side ("8x8 element"); or order = 7
    nx = 1
    ny = 1
    node_family = lobatto       ; lobatto | equispaced | chebyshev
    quadrature = gauss_lobatto  ; gauss_lobatto | gauss_legendre
    lumping = none              ; none | block | trace

    [sweep]
    path = GY                   ; vertices G, X, M, Y
    samples = 30                ; per segment
    n_modes = 10

    [output]
    directory = out
    formats = csv, json         ; add svg for a band diagram
"""
from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .basis import (EQUISPACED, GAUSS_LEGENDRE, GAUSS_LOBATTO, LOBATTO, NODE_FAMILIES,
                    QUADRATURE_KINDS, ElementSpec, make_nodal_set, make_quadrature)
from .cellmesh import (DEFAULT_SIDE_FRACTION, Bilayer, Homogeneous, MatrixInclusion,
                       MatrixPore, UnitCell)
from .elasticity import Material
from .errors import ConfigurationError

LAYOUTS = ("homogeneous", "bilayer", "inclusion", "pore")
LUMPING = ("none", "block", "trace")
FORMATS = ("csv", "json", "svg")
DEFAULT_SAMPLES = 30
DEFAULT_MODES = 10


@dataclass
class RunConfig:
    materials: dict
    layout: str
    cell_materials: dict          # role -> material name
    d_a: float = 1.0
    d_b: float = 1.0
    side_fraction: float = DEFAULT_SIDE_FRACTION
    element: int = 8
    nx: int = 1
    ny: int = 1
    node_family: str = LOBATTO
    quadrature: str = GAUSS_LOBATTO
    lumping: str = "none"
    path: str = "GY"
    samples: int = DEFAULT_SAMPLES
    n_modes: int = DEFAULT_MODES
    directory: str = "out"
    formats: tuple = ("csv", "json")
    source: Optional[str] = field(default=None, compare=False)

    def cell(self) -> UnitCell:
        m = {role: self.materials[name] for role, name in self.cell_materials.items()}
        if self.layout == "homogeneous":
            layout = Homogeneous(m["material"])
        elif self.layout == "bilayer":
            layout = Bilayer(m["bottom"], m["top"])
        elif self.layout == "inclusion":
            layout = MatrixInclusion(m["matrix"], m["inclusion"], self.side_fraction)
        else:
            layout = MatrixPore(m["matrix"], self.side_fraction)
        return UnitCell(self.d_a, self.d_b, layout)

    def element_spec(self) -> ElementSpec:
        M = self.element - 1
        return ElementSpec(make_nodal_set(self.node_family, M),
                           make_quadrature(self.quadrature, self.element))

    @property
    def lumping_mode(self) -> Optional[str]:
        return None if self.lumping == "none" else self.lumping

    def to_ini(self) -> str:
        """Canonical echo with every default resolved."""
        lines = []
        for name in sorted(self.materials):
            m = self.materials[name]
            lines += [f"[material {name}]", f"E = {m.E!r}", f"nu = {m.nu!r}", f"rho = {m.rho!r}", ""]
        lines += ["[cell]", f"layout = {self.layout}"]
        lines += [f"{role} = {name}" for role, name in self.cell_materials.items()]
        if self.layout in ("inclusion", "pore"):
            lines.append(f"side_fraction = {self.side_fraction!r}")
        lines += [f"d_a = {self.d_a!r}", f"d_b = {self.d_b!r}", ""]
        lines += ["[discretization]", f"element = {self.element}", f"nx = {self.nx}", f"ny = {self.ny}",
                  f"node_family = {self.node_family}", f"quadrature = {self.quadrature}",
                  f"lumping = {self.lumping}", ""]
        lines += ["[sweep]", f"path = {self.path}", f"samples = {self.samples}",
                  f"n_modes = {self.n_modes}", ""]
        lines += ["[output]", f"directory = {self.directory}", f"formats = {', '.join(self.formats)}", ""]
        return "\n".join(lines)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_ini().encode()).hexdigest()[:16]


_ROLES = {
    "homogeneous": ("material",),
    "bilayer": ("bottom", "top"),
    "inclusion": ("matrix", "inclusion"),
    "pore": ("matrix",),
}

_KNOWN = {
    "cell": {"layout", "material", "bottom", "top", "matrix", "inclusion", "side_fraction", "d_a", "d_b"},
    "discretization": {"element", "order", "nx", "ny", "node_family", "quadrature", "lumping"},
    "sweep": {"path", "samples", "n_modes"},
    "output": {"directory", "formats"},
}


def _number(section, key, kind, default=None, positive=True):
    full = f"{section.name}.{key}"
    if key not in section:
        if default is None:
            raise ConfigurationError("missing required key", key=full)
        return default
    raw = section[key]
    try:
        value = kind(raw)
    except ValueError:
        raise ConfigurationError(f"expected a {kind.__name__}, got {raw!r}", key=full) from None
    if positive and not value > 0:
        raise ConfigurationError(f"must be positive, got {raw!r}", key=full)
    return value


def _choice(section, key, options, default):
    value = section.get(key, default).strip().lower()
    if value not in options:
        raise ConfigurationError(f"must be one of {', '.join(options)}; got {value!r}",
                                 key=f"{section.name}.{key}")
    return value


def parse_string(text: str, source: Optional[str] = None) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=source or "<config>")
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None

    materials = {}
    for name in cp.sections():
        if name.startswith("material "):
            sec = cp[name]
            label = name.split(None, 1)[1].strip()
            try:
                materials[label] = Material(label, _number(sec, "E", float),
                                            _number(sec, "nu", float, positive=False),
                                            _number(sec, "rho", float))
            except ValueError as exc:
                if isinstance(exc, ConfigurationError):
                    raise
                raise ConfigurationError(str(exc), key=name) from None
        elif name not in _KNOWN:
            raise ConfigurationError("unknown section", key=name)
    for name, allowed in _KNOWN.items():
        if name in cp:
            extra = set(cp[name]) - allowed
            if extra:
                raise ConfigurationError("unknown key", key=f"{name}.{sorted(extra)[0]}")
    if "cell" not in cp:
        raise ConfigurationError("missing section", key="cell")
    for name in ("discretization", "sweep", "output"):
        if name not in cp:
            cp.add_section(name)

    cell = cp["cell"]
    layout = _choice(cell, "layout", LAYOUTS, "homogeneous")
    roles = {}
    for role in _ROLES[layout]:
        if role not in cell:
            raise ConfigurationError(f"{layout} cells need a {role} material", key=f"cell.{role}")
        ref = cell[role].strip()
        if ref not in materials:
            raise ConfigurationError(f"material {ref!r} is not defined in a [material {ref}] section",
                                     key=f"cell.{role}")
        roles[role] = ref
    side_fraction = _number(cell, "side_fraction", float, DEFAULT_SIDE_FRACTION)
    if not side_fraction < 1:
        raise ConfigurationError("must lie in (0, 1)", key="cell.side_fraction")
    d_a = _number(cell, "d_a", float, 1.0)
    d_b = _number(cell, "d_b", float, 1.0)

    disc = cp["discretization"]
    if "element" in disc and "order" in disc:
        raise ConfigurationError("give either element (nodes per side) or order (degree), not both",
                                 key="discretization.order")
    if "order" in disc:
        element = _number(disc, "order", int) + 1
    else:
        element = _number(disc, "element", int, 8)
    if element < 2:
        raise ConfigurationError("an element needs at least 2 nodes per side", key="discretization.element")
    nx = _number(disc, "nx", int, 1)
    ny = _number(disc, "ny", int, 1)
    family = _choice(disc, "node_family", NODE_FAMILIES, LOBATTO)
    quad = _choice(disc, "quadrature", QUADRATURE_KINDS,
                   GAUSS_LOBATTO if family == LOBATTO else GAUSS_LEGENDRE)
    if family == LOBATTO and quad != GAUSS_LOBATTO:
        raise ConfigurationError("Lobatto (spectral) nodes require gauss_lobatto quadrature",
                                 key="discretization.quadrature")
    if quad == GAUSS_LOBATTO and family != LOBATTO:
        raise ConfigurationError(f"gauss_lobatto quadrature needs Lobatto nodes, not {family}",
                                 key="discretization.quadrature")
    lumping = _choice(disc, "lumping", LUMPING, "none")
    if layout == "bilayer" and ny % 2:
        raise ConfigurationError(
            f"bilayer cells need an even ny so the layer interface lies on element edges (got {ny})",
            key="discretization.ny")
    if layout in ("inclusion", "pore"):
        for key, n in (("nx", nx), ("ny", ny)):
            i = n * (1 - side_fraction) / 2
            if abs(i - round(i)) > 1e-9:
                raise ConfigurationError(
                    f"inclusion edge does not fall on an element boundary; need {key}*(1-side_fraction)/2 integral",
                    key=f"discretization.{key}")

    sweep = cp["sweep"]
    route = sweep.get("path", "GY" if layout in ("homogeneous", "bilayer") else "GX").strip().upper()
    if len(route) < 2 or set(route) - set("GXMY"):
        raise ConfigurationError("path must list at least two of the vertices G, X, M, Y", key="sweep.path")
    samples = _number(sweep, "samples", int, DEFAULT_SAMPLES)
    if samples < 2:
        raise ConfigurationError("need at least 2 samples per segment", key="sweep.samples")
    n_modes = _number(sweep, "n_modes", int, DEFAULT_MODES)

    out = cp["output"]
    directory = out.get("directory", "out").strip()
    formats = tuple(f.strip().lower() for f in out.get("formats", "csv, json").split(",") if f.strip())
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ConfigurationError(f"unknown output format {sorted(bad)[0]!r}", key="output.formats")

    return RunConfig(materials, layout, roles, d_a, d_b, side_fraction, element, nx, ny, family, quad,
                     lumping, route, samples, n_modes, directory, formats, source)


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}") from None
    return parse_string(text, str(path))
