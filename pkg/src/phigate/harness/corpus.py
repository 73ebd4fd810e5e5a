"""Synthetic discharge-note corpus with exact gold PHI labels.

Notes follow a discharge-summary skeleton (header block, history of present
illness, hospital course, contact block) with PHI filled from the bundled
lexicons at known offsets, so gold spans are exact by construction. The
generator is deterministic for a fixed (n, seed).

Two impurities are injected deliberately, mirroring what real detectors
face: a few notes carry names outside every lexicon (unrecoverable misses),
and some notes carry year-shaped room numbers and family-history diagnoses
(false-positive bait). Gold labels exclude the bait: a relative's diagnosis
and a room number are not the patient's identifiers.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from ..phi.categories import (
    ADDRESS,
    AGE,
    CONDITION,
    DATE,
    EMAIL,
    INSURANCE_ID,
    MEDICATION,
    MRN,
    PATIENT_NAME,
    PHONE,
    PROVIDER_NAME,
    SSN,
    YEAR,
    PhiCategory,
    PhiSpan,
    Source,
    byte_offsets,
)
from ..phi.gazetteer import _load_lexicon

# Names deliberately absent from the detector lexicons.
RARE_NAMES = ("Xiulan Ng", "Thandiwe Dlamini", "Eero Väisänen")

_SERVICES = ("Medicine", "Cardiology", "Surgery", "Neurology", "Oncology")
_COMPLAINTS = (
    "Abdominal fullness and discomfort",
    "Chest pain on exertion",
    "Shortness of breath",
    "Dizziness and fatigue",
    "Lower extremity swelling",
    "Productive cough",
)
_STREETS = ("Maple Street", "Oak Avenue", "Cedar Lane", "Elm Drive", "Birch Road", "Walnut Court")
_CITIES = ("Springfield", "Riverton", "Lakewood", "Fairview", "Greenville")


@dataclass(frozen=True)
class GoldNote:
    text: str
    spans: tuple
    template_id: str
    seed: int


class _NoteBuilder:
    def __init__(self):
        self.parts: list = []
        self.length = 0
        self.marks: list = []

    def add(self, text: str) -> None:
        self.parts.append(text)
        self.length += len(text)

    def add_phi(self, text: str, category: PhiCategory) -> None:
        self.marks.append((self.length, self.length + len(text), category))
        self.add(text)

    def build(self, template_id: str, seed: int) -> GoldNote:
        text = "".join(self.parts)
        offsets = byte_offsets(text)
        spans = tuple(
            PhiSpan(offsets[start], offsets[end], category, Source.PATTERN, 1.0)
            for start, end, category in self.marks
        )
        return GoldNote(text=text, spans=spans, template_id=template_id, seed=seed)


def _date(rng: random.Random, iso: bool = False) -> str:
    year = rng.randint(2015, 2024)
    month = rng.randint(1, 12)
    day = rng.randint(1, 28)
    if iso:
        return f"{year:04d}-{month:02d}-{day:02d}"
    return f"{month:02d}/{day:02d}/{year:04d}"


def _generate_note(rng: random.Random, index: int, seed: int, rare_name: bool) -> GoldNote:
    first_names = _load_lexicon("first_names.txt")
    last_names = _load_lexicon("last_names.txt")
    conditions = _load_lexicon("conditions.txt")
    medications = _load_lexicon("medications.txt")

    b = _NoteBuilder()
    b.add("Discharge Summary\n\n")

    if rare_name:
        name = rng.choice(RARE_NAMES)
    else:
        name = f"{rng.choice(first_names)} {rng.choice(last_names)}"
    b.add("Name: ")
    b.add_phi(name, PATIENT_NAME)
    b.add(f"  Sex: {rng.choice('MF')}\n")

    if rng.random() < 0.27:
        mrn = f"MRN-{rng.randint(10_000_000, 99_999_999)}" if rng.random() < 0.5 else (
            rng.choice("ABCDEFGHJK") + f"{rng.randint(100000, 999999)}"
        )
        b.add("Unit No: ")
        b.add_phi(mrn, MRN)
        b.add("\n")

    if rng.random() < 0.18:
        b.add("DOB: ")
        b.add_phi(_date(rng), DATE)
        b.add("\n")

    if rng.random() < 0.21:
        b.add("Admission Date: ")
        b.add_phi(_date(rng, iso=rng.random() < 0.4), DATE)
        b.add("  Discharge Date: ")
        b.add_phi(_date(rng, iso=rng.random() < 0.4), DATE)
        b.add("\n")

    b.add(f"Service: {rng.choice(_SERVICES)}\n")

    if rng.random() < 0.22:
        provider = f"Dr. {rng.choice(first_names)} {rng.choice(last_names)}"
        b.add("Attending: ")
        b.add_phi(provider, PROVIDER_NAME)
        b.add("\n")

    if rng.random() < 0.12:
        b.add("Allergies: ")
        b.add_phi(rng.choice(medications), MEDICATION)
        b.add("\n")
    else:
        b.add("Allergies: No Known Allergies\n")

    b.add(f"Chief Complaint: {rng.choice(_COMPLAINTS)}.\n\n")

    b.add("History of Present Illness: ")
    if rng.random() < 0.36:
        b.add("The patient is a ")
        b.add_phi(str(rng.randint(21, 95)), AGE)
        b.add(f"{rng.choice(('-year-old', ' year old'))} {rng.choice(('man', 'woman'))} with ")
    else:
        b.add("Patient with a history of ")
    b.add_phi(rng.choice(conditions), CONDITION)
    if rng.random() < 0.07:
        b.add(" and ")
        b.add_phi(rng.choice(conditions), CONDITION)
    b.add(f", presenting with {rng.choice(_COMPLAINTS).lower()}.")
    if rng.random() < 0.02:
        b.add(f" Admitted to Room {rng.randint(1990, 2039)}.")
    b.add("\n\n")

    b.add("Hospital Course: The patient was managed supportively")
    if rng.random() < 0.26:
        b.add(" and started on ")
        b.add_phi(rng.choice(medications), MEDICATION)
        b.add(f" {rng.choice(('250mg', '500mg', '10mg', '20mg'))} {rng.choice(('daily', 'twice daily'))}")
    b.add(". Vitals remained stable.\n")

    if rng.random() < 0.2:
        b.add(f"Family History: {rng.choice(('Mother', 'Father', 'Brother'))} with ")
        b.add(rng.choice(conditions))  # a relative's diagnosis: not the patient's PHI
        b.add(".\n")

    if rng.random() < 0.17:
        b.add("Past Surgical History: appendectomy in ")
        b.add_phi(str(rng.randint(1990, 2020)), YEAR)
        b.add(".\n")

    b.add("Imaging: CXR - No acute cardiopulmonary abnormality.\n\n")

    if rng.random() < 0.12:
        b.add("SSN: ")
        b.add_phi(f"{rng.randint(100, 899)}-{rng.randint(10, 99)}-{rng.randint(1000, 9999)}", SSN)
        b.add("\n")
    if rng.random() < 0.15:
        b.add("Insurance ID: ")
        b.add_phi("".join(rng.choice("ABCDEFGHJKLMNP") for _ in range(3)) + str(rng.randint(100_000_000, 999_999_999)), INSURANCE_ID)
        b.add("\n")
    if rng.random() < 0.1:
        phone = f"({rng.randint(200, 989)}) {rng.randint(200, 989)}-{rng.randint(1000, 9999)}"
        b.add("Phone: ")
        b.add_phi(phone, PHONE)
        b.add("\n")
    if rng.random() < 0.05:
        user = f"{name.split()[0].lower()}.{name.split()[-1].lower()}"
        b.add("Email: ")
        b.add_phi(f"{user}@example.com", EMAIL)
        b.add("\n")
    if rng.random() < 0.08:
        b.add("Address: ")
        b.add_phi(f"{rng.randint(10, 9999)} {rng.choice(_STREETS)}", ADDRESS)
        b.add(f", {rng.choice(_CITIES)}\n")

    b.add("Follow-up: return to clinic in ")
    b.add(f"{rng.randint(2, 8)} weeks.\n")

    return b.build(template_id=f"discharge-v1/{index % 4}", seed=seed)


def generate_corpus(n: int, seed: int) -> list:
    """`n` gold-labelled notes, deterministic and byte-identical per (n, seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    rare_quota = min(3, n) if n >= 100 else (1 if n >= 10 else 0)
    rare_indices = set(rng.sample(range(n), rare_quota)) if rare_quota else set()
    return [_generate_note(rng, i, seed, rare_name=i in rare_indices) for i in range(n)]


def write_corpus(notes, directory) -> None:
    """One text file and one span sidecar per note, plus a manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, note in enumerate(notes):
        stem = f"note_{i:04d}"
        (directory / f"{stem}.txt").write_text(note.text, encoding="utf-8")
        sidecar = {
            "template_id": note.template_id,
            "seed": note.seed,
            "spans": [
                {"start": s.start, "end": s.end, "category": s.category.name} for s in note.spans
            ],
        }
        (directory / f"{stem}.spans.json").write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    manifest = {
        "notes": len(notes),
        "seed": notes[0].seed if notes else None,
        "gold_spans": sum(len(n.spans) for n in notes),
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def read_corpus(directory) -> list:
    from ..phi.categories import category

    directory = Path(directory)
    notes = []
    for text_path in sorted(directory.glob("note_*.txt")):
        sidecar = json.loads(text_path.with_name(text_path.stem + ".spans.json").read_text(encoding="utf-8"))
        text = text_path.read_text(encoding="utf-8")
        spans = tuple(
            PhiSpan(s["start"], s["end"], category(s["category"]), Source.PATTERN, 1.0)
            for s in sidecar["spans"]
        )
        notes.append(GoldNote(text=text, spans=spans, template_id=sidecar["template_id"], seed=sidecar["seed"]))
    return notes
