"""Independent reference computations used as test oracles.

Nothing here imports the package's computational code; every quantity is
recomputed from first principles in plain Python (exact rationals where the
package promises exactness).
"""

import math
from fractions import Fraction
from itertools import product

_B64URL = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_"


def b64url_nopad(text):
    """Bit-by-bit base64url of the UTF-8 bytes, no padding."""
    bits = "".join(f"{b:08b}" for b in text.encode("utf-8"))
    bits += "0" * (-len(bits) % 6)
    return "".join(_B64URL[int(bits[i:i + 6], 2)] for i in range(0, len(bits), 6))


# moments

def moments(xs):
    """(mean, population stdev, g1, g2) by direct two-pass summation."""
    n = len(xs)
    mean = math.fsum(xs) / n
    d = [x - mean for x in xs]
    m2 = math.fsum(v * v for v in d) / n
    m3 = math.fsum(v * v * v for v in d) / n
    m4 = math.fsum(v * v * v * v for v in d) / n
    return mean, math.sqrt(m2), m3 / m2 ** 1.5, m4 / (m2 * m2) - 3.0


# volumes, written straight from the closed forms

def hole_volume(d, depth):
    return math.pi * (d / 2) ** 2 * depth


def pocket_volume(L, W, depth, r):
    return (L * W - (4 - math.pi) * r ** 2) * depth


def slot_volume(L, W, depth):
    return ((L - W) * W + math.pi * (W / 2) ** 2) * depth


def volume(cls, p):
    if cls == "Hole":
        return hole_volume(p["diameter"], p["depth"])
    if cls == "Pocket":
        return pocket_volume(p["length"], p["width"], p["depth"], p["cornerRadius"])
    return slot_volume(p["length"], p["width"], p["depth"])


# matchmaking

def match(req, profiles):
    """Exhaustive filter then sort.

    `req`: list of (capId, {name: value}, {name: set}).
    `profiles`: {supplierId: {capId: ({name: (lo, hi)}, {name: set})}}.
    A constraint the supplier does not declare does not limit it (slack 1).
    Returns [(supplierId, Fraction score)] best first.
    """
    out = []
    for sid, prof in profiles.items():
        ok, slacks = True, []
        for cap, nums, sets in req:
            if cap not in prof:
                ok = False
                break
            offered_num, offered_sets = prof[cap]
            for name, v in nums.items():
                if name not in offered_num:
                    slacks.append(Fraction(1))
                    continue
                lo, hi = offered_num[name]
                if not lo <= v <= hi:
                    ok = False
                    break
                if lo == hi:
                    slacks.append(Fraction(0))
                else:
                    half = (Fraction(hi) - Fraction(lo)) / 2
                    near = min(Fraction(v) - Fraction(lo), Fraction(hi) - Fraction(v))
                    slacks.append(min(Fraction(1), near / half))
            if not ok:
                break
            for name, wanted in sets.items():
                if name in offered_sets and not set(wanted) <= set(offered_sets[name]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            score = sum(slacks, Fraction(0)) / len(slacks) if slacks else Fraction(0)
            out.append((sid, score))
    return sorted(out, key=lambda t: (-t[1], t[0]))


# costing

PARAMS = {"Hole": ("diameter", "depth"), "Pocket": ("length", "width", "depth", "cornerRadius"),
          "Slot": ("length", "width", "depth")}


def nearest_time(cls, params, history, fallback=None):
    """Linear-scan nearest neighbour; returns (seconds, index or None)."""
    best, best_i = None, None
    for i, h in enumerate(history):
        if h["featureClass"] != cls:
            continue
        d = math.sqrt(math.fsum(
            ((params[p] - h["params"][p]) / max(params[p], h["params"][p], 0.1)) ** 2
            for p in PARAMS[cls]))
        key = (d, h["processTime"], i)
        if best is None or key < best:
            best, best_i = key, i
    if best_i is None:
        if not fallback or cls not in fallback:
            return None, None
        return volume(cls, params) / fallback[cls] * 60.0, None
    h = history[best_i]
    return h["processTime"] * (volume(cls, params) / volume(cls, h["params"])), best_i


def main_tool(machine, cls, params):
    tools = machine["tools"]
    if cls not in machine["supportedClasses"]:
        return None
    if cls == "Hole":
        c = sorted(t["toolId"] for t in tools if t["type"] == "drill" and t["diameter"] == params["diameter"])
        return c[0] if c else None
    if cls == "Slot":
        c = sorted(t["toolId"] for t in tools if t["type"] == "slotmill" and t["diameter"] == params["width"])
        return c[0] if c else None
    c = sorted(((-t["diameter"], t["toolId"]) for t in tools
                if t["type"] == "endmill" and t["diameter"] <= 2 * params["cornerRadius"]))
    return c[0][1] if c else None


def half_up(q):
    return math.floor(q + Fraction(1, 2))


def micro(amount):
    return half_up(Fraction(str(amount)) * 1_000_000)


def exhaustive_cost(features, machines, history, setup="0", fallback=None):
    """Enumerate every machine assignment and keep the cheapest.

    `features`: list of (featureId, class, params).  Returns None when some
    feature has no admissible machine, else
    ``{"total": int, "setup": int, "assign": [(featureId, machineId, micro)]}``.
    Ties between assignments go to the lexicographically smallest machine ids.
    """
    options = []
    for fid, cls, params in features:
        est, _ = nearest_time(cls, params, history, fallback)
        if est is None:
            return None
        opts = []
        for m in machines:
            if main_tool(m, cls, params) is None:
                continue
            exact = Fraction(est) * Fraction(m["hourlyRate"]) / 3600
            opts.append((m["machineId"], exact))
        if not opts:
            return None
        options.append(opts)
    best = None
    for combo in product(*options):
        total = sum((c for _, c in combo), Fraction(0))
        key = (total, tuple(mid for mid, _ in combo))
        if best is None or key < best[0]:
            best = (key, combo)
    combo = best[1] if best else ()
    assign = [(f[0], mid, half_up(exact * 1_000_000)) for f, (mid, exact) in zip(features, combo)]
    s = micro(setup)
    return {"total": sum(a[2] for a in assign) + s, "setup": s, "assign": assign}


# envelope modeler

def envelope(history):
    """Group-by over (class -> capability) of min/max per parameter and material union."""
    caps = {"Hole": "Drilling", "Pocket": "Milling", "Slot": "Slotting"}
    out = {}
    for rec in history:
        cap = caps[rec["featureClass"]]
        entry = out.setdefault(cap, ({}, set()))
        for name, v in rec["params"].items():
            lo, hi = entry[0].get(name, (v, v))
            entry[0][name] = (min(lo, v), max(hi, v))
        if rec.get("material"):
            entry[1].add(rec["material"])
    return out


# requirements and profiles in the `match` oracle's shape

CAP_IRI = "https://maasx.example/capability/"
CAP_OF = {"Hole": "Drilling", "Pocket": "Milling", "Slot": "Slotting"}


def requirement(features, stock=None, material=None):
    """Per-class maxima of feature params plus stock dims; `features` are (fid, cls, params)."""
    maxima = {}
    for _, cls, params in features:
        m = maxima.setdefault(CAP_IRI + CAP_OF[cls], {})
        for name, v in params.items():
            m[name] = max(m.get(name, v), v)
    out = []
    for cap, nums in maxima.items():
        nums = dict(nums)
        if stock is not None:
            nums.update(partLength=stock[0], partWidth=stock[1], partHeight=stock[2])
        out.append((cap, nums, {"material": {material}} if material else {}))
    return out


def profile(history):
    """`envelope` keyed by capability IRI, materials as a set constraint."""
    return {CAP_IRI + cap: (nums, {"material": mats} if mats else {})
            for cap, (nums, mats) in envelope(history).items()}
