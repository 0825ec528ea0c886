"""JSON model documents: parsing, strict schema checks, canonical
serialization, and digests.

Document layout (schema version 1):

    {
      "morph_schema": 1,
      "scale": {"l": 3, "nu": 4},
      "root": "S",
      "components": [
        {"id": "E", "kind": "leaf",
         "das": [{"id": "E3", "priority": 1,
                  "annotations": {...}, "estimate": [3,1,0]}]},
        {"id": "W", "kind": "composite", "children": ["E", "F"],
         "compat": {"default": 0, "pairs": [["E3", "F6", 4]]},
         "priority_overrides": {"E3*F6": 1}}
      ],
      "knapsack": {"kernel": {"A1": "A1_1"},
                   "groups": [{"id": "A2", "items": [
                       {"id": "A2_1", "cost": 4, "profit": 4}]}],
                   "budgets": [9, 10]},
      "options": {"name": "...", "notes": ["..."],
                  "expected": [{"name": "W2", "node": "W",
                                "picks": {"E": "E3", "F": "F6"},
                                "quality": {"w": 2, "e": [5, 0, 0]},
                                "kind": "ordinal", "note": "..."}]}
    }

Unknown keys are rejected everywhere. ``knapsack`` and ``options`` are
optional. Expected entries are reference solutions shipped with a
model; commands recompute them and flag mismatches as warnings instead
of correcting the inputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .knapsack import ChoiceItem, KnapsackInstance
from .model import (
    CompatibilityTable,
    Component,
    DesignAlternative,
    MorphError,
    MorphModel,
    OrdinalScale,
    validate_model,
)

SCHEMA_VERSION = 1


class DocumentError(MorphError, ValueError):
    """The document failed to parse or validate; diagnostics carry the
    offending JSON paths (or line/column for malformed JSON)."""

    def __init__(self, diagnostics: Sequence[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


@dataclass(frozen=True)
class ExpectedSolution:
    """A reference solution shipped with a fixture: named picks plus
    the quality the source material reports for them."""

    name: str
    node: str
    picks: Mapping[str, str]
    w: int
    e: tuple[int, ...]
    kind: str = "ordinal"  # ordinal | median
    note: str | None = None


@dataclass(frozen=True)
class KnapsackSection:
    """Extension data: fixed kernel picks, item groups, trial budgets."""

    kernel: Mapping[str, str]
    groups: tuple[tuple[ChoiceItem, ...], ...]
    budgets: tuple[Any, ...]

    def instance(self, budget) -> KnapsackInstance:
        return KnapsackInstance(groups=self.groups, budget=budget)


@dataclass(frozen=True)
class DocumentOptions:
    name: str | None = None
    notes: tuple[str, ...] = ()
    expected: tuple[ExpectedSolution, ...] = ()


@dataclass(frozen=True)
class ModelDocument:
    model: MorphModel
    knapsack: KnapsackSection | None = None
    options: DocumentOptions = field(default_factory=DocumentOptions)


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def _obj(value, path: str, required: set[str], optional: set[str]) -> dict:
    if not isinstance(value, dict):
        raise DocumentError([f"{path}: expected object, got {type(value).__name__}"])
    missing = required - set(value)
    unknown = set(value) - required - optional
    problems = []
    if missing:
        problems.append(f"{path}: missing keys {sorted(missing)}")
    if unknown:
        problems.append(f"{path}: unknown keys {sorted(unknown)}")
    if problems:
        raise DocumentError(problems)
    return value


def _int(value, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise DocumentError([f"{path}: expected integer, got {value!r}"])
    return value


def _str(value, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise DocumentError([f"{path}: expected non-empty string, got {value!r}"])
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise DocumentError([f"{path}: expected array, got {type(value).__name__}"])
    return value


def _number(value, path: str):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError([f"{path}: expected number, got {value!r}"])
    if isinstance(value, float):
        return Fraction(str(value))
    return value


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_model(text: str) -> ModelDocument:
    """Parse and fully validate a JSON model document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            [f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"]
        ) from None
    return document_from_dict(raw)


def parse_model_file(path) -> ModelDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def document_from_dict(raw) -> ModelDocument:
    top = _obj(
        raw,
        "$",
        required={"morph_schema", "scale", "root", "components"},
        optional={"knapsack", "options"},
    )
    version = _int(top["morph_schema"], "$.morph_schema")
    if version != SCHEMA_VERSION:
        raise DocumentError([f"$.morph_schema: unsupported version {version}"])

    scale_obj = _obj(top["scale"], "$.scale", required={"l", "nu"}, optional=set())
    try:
        scale = OrdinalScale(
            levels=_int(scale_obj["l"], "$.scale.l"),
            max_compat=_int(scale_obj["nu"], "$.scale.nu"),
        )
    except ValueError as exc:
        raise DocumentError([f"$.scale: {exc}"]) from None

    components: dict[str, Component] = {}
    for i, comp_raw in enumerate(_list(top["components"], "$.components")):
        comp = _parse_component(comp_raw, f"$.components[{i}]", scale)
        if comp.id in components:
            raise DocumentError([f"$.components[{i}]: duplicate component id {comp.id!r}"])
        components[comp.id] = comp

    model = MorphModel(
        scale=scale, root=_str(top["root"], "$.root"), components=components
    )
    report = validate_model(model)
    if not report.ok:
        raise DocumentError([f"validation: {line}" for line in report.lines()])

    knapsack = None
    if "knapsack" in top:
        knapsack = _parse_knapsack(top["knapsack"], "$.knapsack")
    options = DocumentOptions()
    if "options" in top:
        options = _parse_options(top["options"], "$.options", scale)
    return ModelDocument(model=model, knapsack=knapsack, options=options)


def _parse_component(raw, path: str, scale: OrdinalScale) -> Component:
    obj = _obj(
        raw,
        path,
        required={"id", "kind"},
        optional={"das", "children", "compat", "priority_overrides"},
    )
    cid = _str(obj["id"], f"{path}.id")
    kind = _str(obj["kind"], f"{path}.kind")
    if kind not in ("leaf", "composite"):
        raise DocumentError([f"{path}.kind: expected leaf|composite, got {kind!r}"])

    das: list[DesignAlternative] = []
    for j, da_raw in enumerate(_list(obj.get("das", []), f"{path}.das")):
        das.append(_parse_da(da_raw, f"{path}.das[{j}]", scale))
    children = tuple(
        _str(c, f"{path}.children[{j}]")
        for j, c in enumerate(_list(obj.get("children", []), f"{path}.children"))
    )
    if kind == "leaf" and children:
        raise DocumentError([f"{path}: leaf component lists children"])
    if kind == "composite" and not children:
        raise DocumentError([f"{path}: composite component lists no children"])

    compat = None
    if "compat" in obj:
        compat = _parse_compat(obj["compat"], f"{path}.compat")
    overrides: dict[str, int] = {}
    if "priority_overrides" in obj:
        over_raw = obj["priority_overrides"]
        if not isinstance(over_raw, dict):
            raise DocumentError([f"{path}.priority_overrides: expected object"])
        for label, prio in over_raw.items():
            overrides[label] = _int(prio, f"{path}.priority_overrides[{label}]")
    return Component(
        id=cid,
        das=tuple(das),
        children=children,
        compat=compat,
        priority_overrides=overrides,
    )


def _parse_da(raw, path: str, scale: OrdinalScale) -> DesignAlternative:
    obj = _obj(
        raw, path, required={"id", "priority"}, optional={"annotations", "estimate"}
    )
    annotations: dict[str, str] = {}
    if "annotations" in obj:
        ann_raw = obj["annotations"]
        if not isinstance(ann_raw, dict):
            raise DocumentError([f"{path}.annotations: expected object"])
        for k, v in ann_raw.items():
            annotations[k] = _str(v, f"{path}.annotations[{k}]")
    estimate = None
    if "estimate" in obj:
        estimate = tuple(
            _int(c, f"{path}.estimate[{j}]")
            for j, c in enumerate(_list(obj["estimate"], f"{path}.estimate"))
        )
    return DesignAlternative(
        id=_str(obj["id"], f"{path}.id"),
        priority=_int(obj["priority"], f"{path}.priority"),
        annotations=annotations,
        estimate=estimate,
    )


def _parse_compat(raw, path: str) -> CompatibilityTable:
    obj = _obj(raw, path, required={"default", "pairs"}, optional=set())
    default = _int(obj["default"], f"{path}.default")
    entries: dict[tuple[str, str], int] = {}
    for j, pair_raw in enumerate(_list(obj["pairs"], f"{path}.pairs")):
        ppath = f"{path}.pairs[{j}]"
        pair = _list(pair_raw, ppath)
        if len(pair) != 3:
            raise DocumentError([f"{ppath}: expected [id, id, value]"])
        a = _str(pair[0], f"{ppath}[0]")
        b = _str(pair[1], f"{ppath}[1]")
        value = _int(pair[2], f"{ppath}[2]")
        key = CompatibilityTable.key(a, b)
        if key in entries and entries[key] != value:
            raise DocumentError([f"{ppath}: conflicting duplicate for pair {key}"])
        entries[key] = value
    return CompatibilityTable(default=default, entries=entries)


def _parse_knapsack(raw, path: str) -> KnapsackSection:
    obj = _obj(raw, path, required={"groups"}, optional={"kernel", "budgets"})
    kernel: dict[str, str] = {}
    if "kernel" in obj:
        kernel_raw = obj["kernel"]
        if not isinstance(kernel_raw, dict):
            raise DocumentError([f"{path}.kernel: expected object"])
        for comp, pick in kernel_raw.items():
            kernel[comp] = _str(pick, f"{path}.kernel[{comp}]")
    groups: list[tuple[ChoiceItem, ...]] = []
    for j, group_raw in enumerate(_list(obj["groups"], f"{path}.groups")):
        gpath = f"{path}.groups[{j}]"
        gobj = _obj(group_raw, gpath, required={"id", "items"}, optional=set())
        gid = _str(gobj["id"], f"{gpath}.id")
        items = []
        for k, item_raw in enumerate(_list(gobj["items"], f"{gpath}.items")):
            ipath = f"{gpath}.items[{k}]"
            iobj = _obj(item_raw, ipath, required={"id", "cost", "profit"}, optional=set())
            items.append(
                ChoiceItem(
                    id=_str(iobj["id"], f"{ipath}.id"),
                    group=gid,
                    cost=_number(iobj["cost"], f"{ipath}.cost"),
                    profit=_number(iobj["profit"], f"{ipath}.profit"),
                )
            )
        if not items:
            raise DocumentError([f"{gpath}.items: group is empty"])
        groups.append(tuple(items))
    budgets = tuple(
        _number(b, f"{path}.budgets[{j}]")
        for j, b in enumerate(_list(obj.get("budgets", []), f"{path}.budgets"))
    )
    return KnapsackSection(kernel=kernel, groups=tuple(groups), budgets=budgets)


def _parse_options(raw, path: str, scale: OrdinalScale) -> DocumentOptions:
    obj = _obj(raw, path, required=set(), optional={"name", "notes", "expected"})
    name = _str(obj["name"], f"{path}.name") if "name" in obj else None
    notes = tuple(
        _str(n, f"{path}.notes[{j}]")
        for j, n in enumerate(_list(obj.get("notes", []), f"{path}.notes"))
    )
    expected: list[ExpectedSolution] = []
    for j, exp_raw in enumerate(_list(obj.get("expected", []), f"{path}.expected")):
        epath = f"{path}.expected[{j}]"
        eobj = _obj(
            exp_raw,
            epath,
            required={"name", "node", "picks", "quality"},
            optional={"kind", "note"},
        )
        picks_raw = eobj["picks"]
        if not isinstance(picks_raw, dict):
            raise DocumentError([f"{epath}.picks: expected object"])
        picks = {k: _str(v, f"{epath}.picks[{k}]") for k, v in picks_raw.items()}
        qobj = _obj(eobj["quality"], f"{epath}.quality", required={"w", "e"}, optional=set())
        e = tuple(
            _int(c, f"{epath}.quality.e[{k}]")
            for k, c in enumerate(_list(qobj["e"], f"{epath}.quality.e"))
        )
        if len(e) != scale.levels:
            raise DocumentError([f"{epath}.quality.e: expected {scale.levels} levels"])
        kind = eobj.get("kind", "ordinal")
        if kind not in ("ordinal", "median"):
            raise DocumentError([f"{epath}.kind: expected ordinal|median, got {kind!r}"])
        expected.append(
            ExpectedSolution(
                name=_str(eobj["name"], f"{epath}.name"),
                node=_str(eobj["node"], f"{epath}.node"),
                picks=picks,
                w=_int(qobj["w"], f"{epath}.quality.w"),
                e=e,
                kind=kind,
                note=_str(eobj["note"], f"{epath}.note") if "note" in eobj else None,
            )
        )
    return DocumentOptions(name=name, notes=notes, expected=tuple(expected))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _number_out(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return float(value)
    return value


def document_to_dict(doc: ModelDocument) -> dict:
    """Rebuild the JSON form of a document. Round-trips: parsing the
    output yields an identical model digest."""
    model = doc.model
    out: dict[str, Any] = {
        "morph_schema": SCHEMA_VERSION,
        "scale": {"l": model.scale.levels, "nu": model.scale.max_compat},
        "root": model.root,
        "components": [
            _component_to_dict(comp) for comp in sorted(model.components.values(), key=lambda c: c.id)
        ],
    }
    if doc.knapsack is not None:
        ks = doc.knapsack
        out["knapsack"] = {
            "kernel": dict(sorted(ks.kernel.items())),
            "groups": [
                {
                    "id": group[0].group,
                    "items": [
                        {
                            "id": item.id,
                            "cost": _number_out(item.cost),
                            "profit": _number_out(item.profit),
                        }
                        for item in group
                    ],
                }
                for group in ks.groups
            ],
            "budgets": [_number_out(b) for b in ks.budgets],
        }
    opts = doc.options
    if opts.name or opts.notes or opts.expected:
        oout: dict[str, Any] = {}
        if opts.name:
            oout["name"] = opts.name
        if opts.notes:
            oout["notes"] = list(opts.notes)
        if opts.expected:
            oout["expected"] = [
                {
                    "name": exp.name,
                    "node": exp.node,
                    "picks": dict(sorted(exp.picks.items())),
                    "quality": {"w": exp.w, "e": list(exp.e)},
                    **({"kind": exp.kind} if exp.kind != "ordinal" else {}),
                    **({"note": exp.note} if exp.note else {}),
                }
                for exp in opts.expected
            ]
        out["options"] = oout
    return out


def _component_to_dict(comp: Component) -> dict:
    out: dict[str, Any] = {"id": comp.id, "kind": "leaf" if comp.is_leaf else "composite"}
    if comp.das:
        das = []
        for da in comp.das:
            dout: dict[str, Any] = {"id": da.id, "priority": da.priority}
            if da.annotations:
                dout["annotations"] = dict(sorted(da.annotations.items()))
            if da.estimate is not None:
                dout["estimate"] = list(da.estimate)
            das.append(dout)
        out["das"] = das
    if comp.children:
        out["children"] = list(comp.children)
    if comp.compat is not None:
        out["compat"] = {
            "default": comp.compat.default,
            "pairs": [
                [a, b, value]
                for (a, b), value in sorted(comp.compat.entries.items())
            ],
        }
    if comp.priority_overrides:
        out["priority_overrides"] = dict(sorted(comp.priority_overrides.items()))
    return out


def serialize_document(doc: ModelDocument) -> str:
    return canonical_json(document_to_dict(doc))


def canonical_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def model_digest(model: MorphModel) -> str:
    """Stable content hash of the model portion alone."""
    doc = ModelDocument(model=model)
    payload = canonical_json(document_to_dict(doc))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
