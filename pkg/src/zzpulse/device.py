"""Qubit graphs for two-species globally driven processors.

A :class:`Device` is a set of sites of species ``A`` or ``B`` joined by
always-on ZZ edges of one strength ``zeta``.  Each species is split into
subgroups by Rabi multiplier: regular (x1), crossed (x2), double-crossed (x4).
Site ids double as statevector bit positions.

Two builders are provided:

``build_conveyor(n)``
    a ring ``(B^r A^x B^x A^r) * n/2`` carrying logical qubits on its ``n``
    B sites ``Q_1..Q_n`` (``Q_1`` double-crossed), plus one double-crossed A
    hub coupled to ``Q_2, Q_3, Q_4``.  ``2n + 1`` sites.
``build_ladder(n)``
    ``n`` rows of ``2n + 3`` alternating B/A sites (B on even columns) with
    ``n - 1`` crossed-A connectors between neighbouring rows.
    ``2n**2 + 4n - 1`` sites.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

SPECIES = ("A", "B")
SUBGROUPS = ("regular", "crossed", "double_crossed")
#: 1-based subgroup index j; the Rabi multiplier is 2**(j-1)
SUBGROUP_INDEX = {name: j for j, name in enumerate(SUBGROUPS, start=1)}

FIXTURE_DIR = Path(__file__).parent / "fixtures"


@dataclass(frozen=True)
class QubitSite:
    id: int
    species: str
    subgroup: str = "regular"
    role: str = ""
    coordination: int = 0

    @property
    def subgroup_index(self) -> int:
        return SUBGROUP_INDEX[self.subgroup]

    @property
    def multiplier(self) -> int:
        return 2 ** (self.subgroup_index - 1)


@dataclass(frozen=True)
class Device:
    sites: tuple[QubitSite, ...]
    edges: tuple[tuple[int, int], ...]
    zeta: float = 1.0
    architecture: str = "custom"
    n: int = 0
    logical_map: tuple[int, ...] = ()
    layout: dict = field(default_factory=dict, compare=False, hash=False)
    _neighbors: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        nbrs: list[set[int]] = [set() for _ in self.sites]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        object.__setattr__(self, "_neighbors", tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    @property
    def num_logical(self) -> int:
        return len(self.logical_map)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._neighbors[i]

    def degree(self, i: int) -> int:
        return len(self._neighbors[i])

    def species_sites(self, species: str) -> list[QubitSite]:
        return [s for s in self.sites if s.species == species]

    def subgroup_count(self, species: str) -> int:
        """Number of subgroups a pulse on ``species`` must address (highest index present)."""
        return max((s.subgroup_index for s in self.sites if s.species == species), default=1)

    def sites_in(self, species: str, subgroup: str) -> list[int]:
        return [s.id for s in self.sites if s.species == species and s.subgroup == subgroup]

    def to_dict(self) -> dict[str, Any]:
        return {
            "architecture": self.architecture,
            "n": self.n,
            "zeta": self.zeta,
            "sites": [
                {"id": s.id, "species": s.species, "subgroup": s.subgroup, "role": s.role}
                for s in self.sites
            ],
            "edges": [list(e) for e in self.edges],
            "logical_map": list(self.logical_map),
            "layout": self.layout,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Device":
        zeta = float(data.get("zeta", 1.0))
        edges = []
        for e in data.get("edges", []):
            if len(e) == 3 and float(e[2]) != zeta:
                raise ValueError(f"edge {e[:2]} has coupling {e[2]} != device zeta {zeta}")
            edges.append((int(e[0]), int(e[1])))
        raw = sorted(data["sites"], key=lambda s: s["id"])
        degree = [0] * len(raw)
        for i, j in edges:
            degree[i] += 1
            degree[j] += 1
        sites = tuple(
            QubitSite(
                int(s["id"]),
                s["species"],
                s.get("subgroup", "regular"),
                s.get("role", ""),
                degree[k],
            )
            for k, s in enumerate(raw)
        )
        return cls(
            sites=sites,
            edges=tuple(edges),
            zeta=zeta,
            architecture=data.get("architecture", "custom"),
            n=int(data.get("n", 0)),
            logical_map=tuple(int(i) for i in data.get("logical_map", [])),
            layout=_restore_layout(data.get("layout", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "Device":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "Device":
        return cls.from_json(Path(path).read_text())


def _restore_layout(layout: dict) -> dict:
    # JSON turns int keys into strings
    out = dict(layout)
    if "connectors" in out:
        out["connectors"] = {int(k): v for k, v in out["connectors"].items()}
    return out


def make_device(site_specs, edges, *, zeta=1.0, architecture="custom", n=0, logical_map=(), layout=None):
    """Build a device, filling in coordination numbers from the edge list.

    ``site_specs`` holds ``(species, subgroup, role)`` tuples indexed by id.
    """
    edges = tuple((min(i, j), max(i, j)) for i, j in edges)
    degree = [0] * len(site_specs)
    for i, j in edges:
        degree[i] += 1
        degree[j] += 1
    sites = tuple(
        QubitSite(k, sp, sg, role, degree[k]) for k, (sp, sg, role) in enumerate(site_specs)
    )
    return Device(sites, edges, float(zeta), architecture, n, tuple(logical_map), layout or {})


def chain(species: str, *, zeta: float = 1.0) -> Device:
    """Open chain of regular sites, e.g. ``chain("BAB")``."""
    specs = [(s, "regular", "") for s in species]
    edges = [(k, k + 1) for k in range(len(species) - 1)]
    return make_device(specs, edges, zeta=zeta)


def detuning_offset(site: QubitSite, zeta: float) -> float:
    """Amount by which the qubit frequency sits below its drive: ``kappa * zeta``."""
    return site.coordination * zeta


def conveyor_site_count(n: int) -> int:
    return 2 * n + 1


def ladder_site_count(n: int) -> int:
    return 2 * n * n + 4 * n - 1


def build_conveyor(n: int, zeta: float = 1.0) -> Device:
    if n < 4 or n % 2:
        raise ValueError(f"conveyor needs an even number of logical qubits >= 4, got {n}")
    specs = []
    for pos in range(2 * n):
        k = pos // 2 + 1  # Q index of this B site, or of the Q site before this mediator
        if pos % 2 == 0:
            if k == 1:
                specs.append(("B", "double_crossed", "Q1"))
            else:
                specs.append(("B", "regular" if k % 2 else "crossed", f"Q{k}"))
        else:
            # mediator between Q_k and Q_{k+1}: crossed on odd-even (T1) links
            specs.append(("A", "crossed" if k % 2 else "regular", "mediator"))
    hub = 2 * n
    specs.append(("A", "double_crossed", "toffoli-hub"))
    ring = [(p, (p + 1) % (2 * n)) for p in range(2 * n)]
    hub_legs = [2, 4, 6]  # Q2, Q3, Q4
    edges = ring + [(hub, q) for q in hub_legs]
    q_sites = [2 * (k - 1) for k in range(1, n + 1)]
    layout = {
        "ring": list(range(2 * n)),
        "q_sites": q_sites,
        "mediators": [2 * k - 1 for k in range(1, n + 1)],
        "hub": hub,
        "hub_legs": hub_legs,
        "gate_site": 0,
    }
    return make_device(specs, edges, zeta=zeta, architecture="conveyor", n=n, logical_map=q_sites, layout=layout)


def ladder_special_subgroup(row: int) -> str:
    """Subgroup of the single-qubit-gate site of 1-based ``row``."""
    return "crossed" if row % 2 else "double_crossed"


def build_ladder(n: int, zeta: float = 1.0) -> Device:
    if n < 2:
        raise ValueError(f"ladder needs at least two rows, got {n}")
    width = 2 * n + 3
    specs = []
    for r in range(1, n + 1):
        for c in range(width):
            if c % 2 == 0:
                b = c // 2
                if b == r:
                    specs.append(("B", ladder_special_subgroup(r), f"gate-site-r{r}"))
                else:
                    specs.append(("B", "regular", "buffer" if b in (0, n + 1) else ""))
            else:
                specs.append(("A", "regular", ""))
    edges = []
    for r in range(n):
        base = r * width
        edges += [(base + c, base + c + 1) for c in range(width - 1)]
    connectors = {}
    for r in range(1, n):
        cid = len(specs)
        col = 2 * r  # B-column index r: the connector for rows (r, r+1)
        specs.append(("A", "crossed", f"connector-r{r}-r{r + 1}"))
        edges += [(cid, (r - 1) * width + col), (cid, r * width + col)]
        connectors[r] = cid
    icc = 1
    layout = {
        "rows": n,
        "width": width,
        "row_sites": [[r * width + c for c in range(width)] for r in range(n)],
        "connectors": connectors,
        "icc_column": icc,
        "processing_columns": list(range(1, n + 1)),
    }
    logical = [r * width + 2 * icc for r in range(n)]
    return make_device(specs, edges, zeta=zeta, architecture="ladder", n=n, logical_map=logical, layout=layout)


def ladder_site(d: Device, row: int, column: int) -> int:
    """Site id at 1-based ``row`` and raw column index."""
    return d.layout["row_sites"][row - 1][column]


def ladder_icc_sites(d: Device, b: int) -> list[int]:
    """Sites of the information-carrying B column with B-column index ``b``."""
    return [ladder_site(d, r, 2 * b) for r in range(1, d.layout["rows"] + 1)]


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(d: Device) -> ValidationReport:
    rep = ValidationReport()
    m = d.num_sites
    for k, s in enumerate(d.sites):
        if s.id != k:
            rep.violations.append(f"site ids must be 0..{m - 1} in order; found {s.id} at {k}")
        if s.species not in SPECIES:
            rep.violations.append(f"site {s.id}: unknown species {s.species!r}")
        if s.subgroup not in SUBGROUPS:
            rep.violations.append(f"site {s.id}: unknown subgroup {s.subgroup!r}")
    seen = set()
    for i, j in d.edges:
        if not (0 <= i < m and 0 <= j < m) or i == j:
            rep.violations.append(f"edge ({i}, {j}) is not a pair of distinct sites")
            continue
        if (min(i, j), max(i, j)) in seen:
            rep.violations.append(f"duplicate edge ({i}, {j})")
        seen.add((min(i, j), max(i, j)))
        if d.sites[i].species == d.sites[j].species:
            rep.violations.append(f"P1: edge ({i}, {j}) joins two {d.sites[i].species} sites")
    if rep.violations:
        return rep
    for s in d.sites:
        if s.coordination != d.degree(s.id):
            rep.violations.append(f"site {s.id}: coordination {s.coordination} != degree {d.degree(s.id)}")
    for q in d.logical_map:
        if not 0 <= q < m:
            rep.violations.append(f"logical map points outside the device: {q}")
    if d.architecture == "conveyor" and m != conveyor_site_count(d.n):
        rep.violations.append(f"conveyor n={d.n} must have {conveyor_site_count(d.n)} sites, has {m}")
    if d.architecture == "ladder":
        if m != ladder_site_count(d.n):
            rep.violations.append(f"ladder n={d.n} must have {ladder_site_count(d.n)} sites, has {m}")
        rows = d.layout.get("row_sites", [])
        for r, row in enumerate(rows, start=1):
            special = [i for i in row if i < m and d.sites[i].species == "B" and d.sites[i].subgroup != "regular"]
            if len(special) != 1:
                rep.violations.append(f"ladder row {r} must hold exactly one crossed/double-crossed B site")
    if m and not _connected(d):
        rep.violations.append("device graph is not connected")
    return rep


def _connected(d: Device) -> bool:
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in d.neighbors(i):
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == d.num_sites


def load_fixture(name: str) -> Device:
    return Device.load(FIXTURE_DIR / f"{name}.json")
