"""Rule-based recognition of holes, pockets and slots on a face-graph part model.

The face graph is a neutral stand-in for CAD topology.  Planar faces carry an
outward normal (one of ``+X -X +Y -Y +Z -Z``, pointing away from material) and
an axis-aligned bounding box ``[[x0, y0, z0], [x1, y1, z1]]``; cylindrical
faces carry ``diameter``, ``axisDepth`` and ``axis`` (the access direction).
Planar faces lying on the stock envelope are treated as stock faces and never
take part in a feature.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import MalformedGraph

DIRECTIONS = ("+X", "-X", "+Y", "-Y", "+Z", "-Z")
FEATURE_CLASSES = ("Hole", "Pocket", "Slot")
CLASS_PARAMS = {
    "Hole": ("diameter", "depth"),
    "Pocket": ("length", "width", "depth", "cornerRadius"),
    "Slot": ("length", "width", "depth"),
}

SLOT_RATIO = 3.0
AMBIGUITY_LOW = 2.5
AMBIGUOUS_CONFIDENCE = 0.7

_FACE_ID = re.compile(r"[A-Za-z0-9_]+\Z")
_TOL = 1e-9


def _axis(direction):
    return "XYZ".index(direction[1])


@dataclass(frozen=True)
class Face:
    face_id: str
    kind: str
    params: dict

    def to_dict(self):
        return {"faceId": self.face_id, "kind": self.kind, "params": self.params}


@dataclass
class FaceGraph:
    part_id: str
    stock: Tuple[float, float, float]
    material: str
    faces: List[Face]
    adjacency: List[Tuple[str, str]]

    def __post_init__(self):
        self.stock = tuple(float(s) for s in self.stock)
        self.adjacency = [tuple(p) for p in self.adjacency]

    @classmethod
    def from_dict(cls, d):
        try:
            stock = d["stock"]
            return cls(d["partId"], (stock["length"], stock["width"], stock["height"]),
                       d.get("material", ""),
                       [Face(f["faceId"], f["kind"], dict(f.get("params", {}))) for f in d["faces"]],
                       [tuple(p) for p in d.get("adjacency", [])])
        except (KeyError, TypeError) as exc:
            raise MalformedGraph(f"malformed face graph: {exc}") from exc

    def to_dict(self):
        return {
            "partId": self.part_id,
            "stock": dict(zip(("length", "width", "height"), self.stock)),
            "material": self.material,
            "faces": [f.to_dict() for f in self.faces],
            "adjacency": [list(p) for p in self.adjacency],
        }


@dataclass
class FeatureInstance:
    feature_id: str
    feature_class: str
    params: Dict[str, float]
    face_refs: Tuple[str, ...] = ()
    confidence: float = 1.0
    removal_volume: float = field(default=None)
    access_direction: str = "+Z"

    def __post_init__(self):
        if self.feature_class not in CLASS_PARAMS:
            raise ValueError(f"unknown feature class {self.feature_class!r}")
        self.face_refs = tuple(self.face_refs)
        if not 0.0 < self.confidence <= 1.0:
            raise ValueError("confidence must lie in (0, 1]")
        if self.removal_volume is None:
            self.removal_volume = volume_of(self.feature_class, self.params)


@dataclass
class Aggregates:
    counts_per_class: Dict[str, int]
    total_removal_volume: float
    min_tool_diameter: Optional[float]
    mean_confidence: Optional[float]


def volume_of(feature_class, params):
    if feature_class == "Hole":
        return math.pi * (params["diameter"] / 2.0) ** 2 * params["depth"]
    if feature_class == "Pocket":
        L, W, r = params["length"], params["width"], params["cornerRadius"]
        return (L * W - (4.0 - math.pi) * r * r) * params["depth"]
    if feature_class == "Slot":
        L, W = params["length"], params["width"]
        return ((L - W) * W + math.pi * (W / 2.0) ** 2) * params["depth"]
    raise ValueError(f"unknown feature class {feature_class!r}")


def feature_volume(f: FeatureInstance) -> float:
    return volume_of(f.feature_class, f.params)


def tool_bound(f: FeatureInstance) -> float:
    """Largest tool diameter the feature admits."""
    if f.feature_class == "Hole":
        return f.params["diameter"]
    if f.feature_class == "Pocket":
        return 2.0 * f.params["cornerRadius"]
    return f.params["width"]


def aggregate(features) -> Aggregates:
    counts = {}
    for f in features:
        counts[f.feature_class] = counts.get(f.feature_class, 0) + 1
    if not features:
        return Aggregates({}, 0.0, None, None)
    return Aggregates(
        dict(sorted(counts.items())),
        math.fsum(f.removal_volume for f in features),
        min(tool_bound(f) for f in features),
        math.fsum(f.confidence for f in features) / len(features),
    )


# recognition

def _check_graph(g: FaceGraph):
    if len(g.stock) != 3 or any(not (s > 0) for s in g.stock):
        raise MalformedGraph("stock dimensions must be > 0")
    faces = {}
    for f in g.faces:
        if not isinstance(f.face_id, str) or not _FACE_ID.match(f.face_id):
            raise MalformedGraph(f"invalid faceId {f.face_id!r}")
        if f.face_id in faces:
            raise MalformedGraph(f"duplicate faceId {f.face_id!r}")
        if f.kind == "cylindrical":
            if not (f.params.get("diameter", 0) > 0 and f.params.get("axisDepth", 0) > 0):
                raise MalformedGraph(f"{f.face_id}: cylinder needs diameter and axisDepth > 0")
            if f.params.get("axis", "+Z") not in DIRECTIONS:
                raise MalformedGraph(f"{f.face_id}: bad axis")
        elif f.kind == "planar":
            if f.params.get("normal") not in DIRECTIONS:
                raise MalformedGraph(f"{f.face_id}: planar face needs a normal in {DIRECTIONS}")
            bbox = f.params.get("bbox")
            if (not isinstance(bbox, (list, tuple)) or len(bbox) != 2
                    or any(len(c) != 3 for c in bbox)):
                raise MalformedGraph(f"{f.face_id}: planar face needs bbox [[x0,y0,z0],[x1,y1,z1]]")
        else:
            raise MalformedGraph(f"{f.face_id}: unknown face kind {f.kind!r}")
        faces[f.face_id] = f
    adj = {fid: set() for fid in faces}
    for pair in g.adjacency:
        if len(pair) != 2:
            raise MalformedGraph(f"adjacency entry {pair!r} is not a pair")
        a, b = pair
        if a not in faces or b not in faces:
            raise MalformedGraph(f"adjacency references unknown face in {pair!r}")
        adj[a].add(b)
        adj[b].add(a)
    return faces, adj


def _extent(face, axis):
    lo, hi = face.params["bbox"]
    return abs(hi[axis] - lo[axis])


def _on_stock(face, stock):
    n = face.params["normal"]
    a = _axis(n)
    lo, hi = face.params["bbox"]
    level = 0.0 if n[0] == "-" else stock[a]
    return abs(lo[a] - level) <= _TOL and abs(hi[a] - level) <= _TOL


def _in_plane(face):
    a = _axis(face.params["normal"])
    return sorted((_extent(face, i) for i in range(3) if i != a), reverse=True)


def _is_four_cycle(walls, adj):
    ws = set(walls)
    if len(ws) != 4:
        return False
    if any(len(adj[w] & ws) != 2 for w in ws):
        return False
    # connected: walk from one wall
    start = min(ws)
    seen, stack = {start}, [start]
    while stack:
        for nxt in adj[stack.pop()] & ws:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen == ws


def recognize_features(g: FaceGraph) -> List[FeatureInstance]:
    faces, adj = _check_graph(g)
    order = sorted(faces)
    interior = {fid for fid in order
                if faces[fid].kind == "planar" and not _on_stock(faces[fid], g.stock)}
    claimed = set()
    found = []

    for fid in order:
        f = faces[fid]
        if f.kind != "cylindrical" or fid in claimed:
            continue
        d = f.params["diameter"]
        axis = f.params.get("axis", "+Z")
        bottoms = [b for b in sorted(adj[fid])
                   if b in interior and b not in claimed
                   and faces[b].params["normal"] == axis
                   and _in_plane(faces[b])[0] <= d + _TOL]
        if len(bottoms) != 1:
            continue
        refs = (fid, bottoms[0])
        claimed.update(refs)
        found.append(FeatureInstance(f"Hole_{min(refs)}", "Hole",
                                     {"diameter": float(d), "depth": float(f.params["axisDepth"])},
                                     refs, 1.0, access_direction=axis))

    for fid in order:
        if fid not in interior or fid in claimed:
            continue
        bottom = faces[fid]
        n = bottom.params["normal"]
        walls = [w for w in sorted(adj[fid])
                 if w in interior and w not in claimed
                 and _axis(faces[w].params["normal"]) != _axis(n)]
        if not _is_four_cycle(walls, adj):
            continue
        length, width = _in_plane(bottom)
        if width <= 0:
            continue
        depth = max(_extent(faces[w], _axis(n)) for w in walls)
        if depth <= 0:
            continue
        refs = tuple(sorted([fid, *walls]))
        claimed.update(refs)
        # tolerance keeps boundary ratios stable under bbox round-off
        ratio = length / width + _TOL
        if ratio < AMBIGUITY_LOW:
            r = float(bottom.params.get("cornerRadius", 0.0))
            if r < 0 or r > min(length, width) / 2.0 + _TOL:
                raise MalformedGraph(f"{fid}: corner radius {r} outside [0, {min(length, width) / 2}]")
            found.append(FeatureInstance(
                f"Pocket_{min(refs)}", "Pocket",
                {"length": float(length), "width": float(width), "depth": float(depth),
                 "cornerRadius": r},
                refs, 1.0, access_direction=n))
        else:
            conf = 1.0 if ratio >= SLOT_RATIO else AMBIGUOUS_CONFIDENCE
            found.append(FeatureInstance(
                f"Slot_{min(refs)}", "Slot",
                {"length": float(length), "width": float(width), "depth": float(depth)},
                refs, conf, access_direction=n))

    found.sort(key=lambda f: f.feature_id)
    return found


class PartBuilder:
    """Assemble consistent face graphs for fixtures and demos.

    Cavities and holes are cut from the top face (+Z) of the stock.
    """

    def __init__(self, part_id, stock, material):
        self.part_id = part_id
        self.stock = tuple(float(s) for s in stock)
        self.material = material
        self.faces = []
        self.adjacency = []
        L, W, H = self.stock
        self.top = self._face("planar", {"normal": "+Z", "bbox": [[0.0, 0.0, H], [L, W, H]]})

    def _face(self, kind, params):
        fid = f"F{len(self.faces):03d}"
        self.faces.append(Face(fid, kind, params))
        return fid

    def add_hole(self, x, y, diameter, depth):
        H = self.stock[2]
        z = H - depth
        r = diameter / 2.0
        cyl = self._face("cylindrical", {"diameter": float(diameter), "axisDepth": float(depth),
                                         "axis": "+Z"})
        bottom = self._face("planar", {"normal": "+Z",
                                       "bbox": [[x - r, y - r, z], [x + r, y + r, z]]})
        self.adjacency += [(self.top, cyl), (cyl, bottom)]
        return self

    def add_cavity(self, x, y, length, width, depth, corner_radius=0.0):
        """Rectangular cavity with its lower corner at (x, y); `length` runs along X."""
        H = self.stock[2]
        z = H - depth
        x1, y1 = x + length, y + width
        floor = self._face("planar", {"normal": "+Z", "bbox": [[x, y, z], [x1, y1, z]],
                                      "cornerRadius": float(corner_radius)})
        wx0 = self._face("planar", {"normal": "+X", "bbox": [[x, y, z], [x, y1, H]]})
        wy0 = self._face("planar", {"normal": "+Y", "bbox": [[x, y, z], [x1, y, H]]})
        wx1 = self._face("planar", {"normal": "-X", "bbox": [[x1, y, z], [x1, y1, H]]})
        wy1 = self._face("planar", {"normal": "-Y", "bbox": [[x, y1, z], [x1, y1, H]]})
        walls = [wx0, wy0, wx1, wy1]
        self.adjacency += [(floor, w) for w in walls]
        self.adjacency += [(self.top, w) for w in walls]
        self.adjacency += [(walls[i], walls[(i + 1) % 4]) for i in range(4)]
        return self

    def build(self) -> FaceGraph:
        return FaceGraph(self.part_id, self.stock, self.material, list(self.faces),
                         list(self.adjacency))
