"""JSON descriptors for waveforms and CAS scenarios.

A waveform document either carries sampled data (the serialized form from
sigcore.to_json) or a generator descriptor with a ``kind`` field mirroring
the parameter dataclasses; the CLI accepts both interchangeably.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import cas, sigcore, wavegen


def _taper_from(doc) -> sigcore.TaperSpec:
    if doc is None:
        return sigcore.TaperSpec("rectangular")
    if isinstance(doc, str):
        return sigcore.TaperSpec(doc)
    return sigcore.TaperSpec(doc.get("kind", "rectangular"), doc.get("shape", 0.0))


def gsfm_params_from(doc: dict) -> wavegen.GsfmParams:
    return wavegen.GsfmParams(
        duration=doc["duration"],
        carrier=doc["carrier"],
        sweep=doc["sweep"],
        rho=doc.get("rho", 2.0),
        alpha=doc.get("alpha"),
        cycles=doc.get("cycles"),
        variant=doc.get("variant", wavegen.GCFI),
        symmetry=doc.get("symmetry", wavegen.NONSYMMETRIC),
    )


def waveform_from_descriptor(doc: dict, seed: int = 0) -> sigcore.Waveform:
    kind = doc.get("kind")
    fs = doc.get("sample_rate")
    taper = _taper_from(doc.get("taper"))
    if kind in ("cw", "lfm", "hfm"):
        w = wavegen.gen_classic(kind, doc["duration"], doc["carrier"], doc.get("sweep", 0.0), fs)
    elif kind == "gsfm":
        w = wavegen.gen_gsfm(gsfm_params_from(doc), fs)
    elif kind == "sfm":
        p = wavegen.SfmParams(
            duration=doc["duration"],
            carrier=doc["carrier"],
            sweep=doc["sweep"],
            mod_freq=doc["mod_freq"],
            phase=doc.get("phase", "sine"),
        )
        w = wavegen.gen_sfm(p, fs)
    elif kind == "costas":
        code = doc.get("code")
        if code is None:
            pool = wavegen.costas_pool(doc["prime"])
            code = pool[seed % len(pool)]
        p = wavegen.CodedParams(
            duration=doc["duration"],
            carrier=doc["carrier"],
            n_chips=len(code),
            code=tuple(code),
            chip_taper=_taper_from(doc.get("chip_taper")),
            chip_spacing=doc["chip_spacing"],
        )
        return wavegen.gen_costas(p, fs)
    elif kind in ("bpsk", "qpsk"):
        code = doc.get("code")
        if code is None:
            code = wavegen.mlsr_sequence(doc["mlsr_degree"])
            if "n_chips" in doc:
                code = code[: doc["n_chips"]]
        p = wavegen.CodedParams(
            duration=doc["duration"],
            carrier=doc["carrier"],
            n_chips=len(code),
            code=tuple(int(c) for c in code),
            chip_taper=_taper_from(doc.get("chip_taper")),
        )
        return wavegen.gen_psk(kind, p, fs, qpsk_sign=doc.get("qpsk_sign", +1),
                               qpsk_transition=doc.get("qpsk_transition", 0.25))
    else:
        raise ValueError(f"unknown waveform kind {kind!r}")
    if taper.kind != "rectangular":
        w = sigcore.normalize_energy(sigcore.apply_taper(w, taper, "time"))
    return w


def load_waveform(source: str, seed: int = 0) -> sigcore.Waveform:
    """Load from a JSON file path or inline JSON text; sampled documents
    (with a ``data`` field) are deserialized, others are generated."""
    text = Path(source).read_text() if Path(source).exists() else source
    doc = json.loads(text)
    if "data" in doc:
        return sigcore.from_json(text)
    return waveform_from_descriptor(doc, seed=seed)


def scenario_from(doc: dict) -> cas.CasScenario:
    dbl_doc = doc.get("dbl", {})
    return cas.CasScenario(
        targets=tuple(
            cas.Target(
                range_m=t["range_m"],
                velocity=t["velocity"],
                acceleration=t.get("acceleration", 0.0),
                strength_db=t.get("strength_db", 0.0),
            )
            for t in doc["targets"]
        ),
        sound_speed=doc.get("sound_speed", 1500.0),
        dbl=cas.DirectBlast(
            source_level_db=dbl_doc.get("source_level_db", 185.0),
            spacing_m=dbl_doc.get("spacing_m", 10.0),
            null_depth_db=dbl_doc.get("null_depth_db", 60.0),
        ),
        spreading=doc.get("spreading", "cylindrical"),
        noise_level_db=doc.get("noise_level_db"),
    )


def train_from(doc: dict) -> tuple[list[sigcore.Waveform], dict]:
    """Build the pulse list for a CAS scenario document's ``train`` section.

    Returns (pulses, info) where info carries t_pri, b_sys and the TBP/R_max
    figures from the train builder.
    """
    base = gsfm_params_from(doc["base"])
    n = doc.get("n_pulses", 12)
    t_pri = doc.get("t_pri", base.duration)
    b_sys = doc["b_sys"]
    kind = doc.get("kind", cas.FBPT)
    fam = cas.design_gsfm_family(base, n)
    taper = _taper_from(doc.get("taper"))
    if taper.kind != "rectangular":
        fam = [
            sigcore.normalize_energy(sigcore.apply_taper(w, taper, "time")) for w in fam
        ]
    if kind == cas.OBPT:
        first = doc["first_center"]
        step = doc["step"]
        steps = [first - base.carrier + step * k for k in range(n)]
    elif kind == cas.SBPT:
        ib = base.sweep
        steps = [(k - (n - 1) / 2.0) * ib for k in range(n)]
    else:
        steps = [0.0] * n
    pulses = []
    for w, st in zip(fam, steps):
        if st:
            t = np.arange(w.n) / w.sample_rate
            w = w.with_samples(
                w.samples * np.exp(2j * np.pi * st * t), carrier=w.carrier + st
            )
        pulses.append(w)
    span = (max(steps) - min(steps)) + base.sweep
    if span > b_sys + 1e-9:
        raise ValueError("train band span exceeds the system bandwidth")
    info = {"t_pri": t_pri, "b_sys": b_sys, "kind": kind, "n_pulses": n}
    return pulses, info
