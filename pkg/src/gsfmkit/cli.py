"""Command-line front end.

Each report command writes its delimited output and, unless --no-plot is
given, renders a companion PNG next to it.  Exit codes: 0 success, 2 for
configuration problems (bad files, unknown options), 3 for numerical-domain
errors (violated preconditions inside the computation).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import ambiguity, cas, descriptors, mainlobe, metrics, mmf, plotting, sigcore, wavegen


def _velocities(args) -> np.ndarray:
    return ambiguity.default_velocities(args.vmax, args.vstep)


def _parse_range(text: str) -> np.ndarray:
    """start:step:stop grid syntax (inclusive stop)."""
    start, step, stop = (float(x) for x in text.split(":"))
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def _plot_path(out: str) -> str:
    return str(Path(out).with_suffix(".png"))


def cmd_synth(args) -> int:
    w = descriptors.load_waveform(args.spec, seed=args.seed)
    out = Path(args.out)
    if args.format == "csv":
        out.write_text(sigcore.to_csv(w))
    else:
        out.write_text(sigcore.to_json(w))
    if not args.no_plot:
        from scipy.signal import spectrogram

        nper = max(16, int(round(w.n / 32)))
        f, t, sxx = spectrogram(
            w.samples,
            fs=w.sample_rate,
            window="hann",
            nperseg=nper,
            noverlap=int(0.75 * nper),
            return_onesided=False,
        )
        order = np.argsort(f)
        keep = f[order] > 0
        power = 10.0 * np.log10(np.maximum(sxx[order][keep], 1e-20))
        plotting.render_spectrogram(t, f[order][keep], power, _plot_path(args.out), title=w.label)
    return 0


def cmd_spectrum(args) -> int:
    w = descriptors.load_waveform(args.waveform, seed=args.seed)
    f, dens = sigcore.spectrum(w)
    keep = (f >= 0) & (f <= 2.0 * w.carrier + 4.0 / w.duration)
    lines = ["freq_hz,energy_density"]
    lines += [f"{fi:.9g},{di:.9g}" for fi, di in zip(f[keep], dens[keep])]
    Path(args.out).write_text("\n".join(lines) + "\n")
    if not args.no_plot:
        db = 10 * np.log10(np.maximum(dens[keep] / dens[keep].max(), 1e-12))
        plotting.render_curve(f[keep], db, _plot_path(args.out),
                              "frequency (Hz)", "energy density (dB)", w.label)
    return 0


def cmd_af(args) -> int:
    w = descriptors.load_waveform(args.waveform, seed=args.seed)
    vel = _velocities(args)
    if args.analytic:
        doc = json.loads(Path(args.waveform).read_text() if Path(args.waveform).exists() else args.waveform)
        if doc.get("kind") == "sfm":
            p = wavegen.SfmParams(doc["duration"], doc["carrier"], doc["sweep"],
                                  doc["mod_freq"], doc.get("phase", "sine"))
            surf = ambiguity.sfm_af_analytic(p, args.model, velocities=vel, c=args.c)
        elif doc.get("kind") == "gsfm":
            p = descriptors.gsfm_params_from(doc)
            which = "naaf" if args.model == ambiguity.NARROWBAND else "baaf"
            surf = ambiguity.gsfm_analytic(p, which, {"velocities": vel}, c=args.c)
        else:
            raise ValueError("analytic surfaces exist for 'sfm' and 'gsfm' descriptors only")
    else:
        surf = ambiguity.xaf(w, w, model=args.model, velocities=vel, c=args.c)
    Path(args.out).write_text(ambiguity.surface_to_csv(surf))
    if args.json_out:
        Path(args.json_out).write_text(ambiguity.surface_to_json(surf))
    if not args.no_plot:
        plotting.render_surface(surf, _plot_path(args.out))
    return 0


def cmd_qfunc(args) -> int:
    w = descriptors.load_waveform(args.waveform, seed=args.seed)
    surf = ambiguity.xaf(w, w, model=args.model, velocities=_velocities(args), c=args.c)
    v, q = ambiguity.qfunction(surf)
    Path(args.out).write_text(ambiguity.qfunction_to_csv(v, q))
    if not args.no_plot:
        plotting.render_curve(v, q, _plot_path(args.out),
                              "velocity (m/s)", "Q (dB)", f"Q-function: {w.label}")
    return 0


def cmd_eoa(args) -> int:
    w = descriptors.load_waveform(args.waveform, seed=args.seed)
    e = mainlobe.eoa_numeric(w)
    doc = asdict(e)
    if args.closed:
        src = json.loads(Path(args.waveform).read_text() if Path(args.waveform).exists() else args.waveform)
        if src.get("kind") != "gsfm":
            raise ValueError("--closed needs a 'gsfm' descriptor")
        doc["closed_form"] = asdict(mainlobe.eoa_gsfm_closed(descriptors.gsfm_params_from(src)))
    Path(args.out).write_text(json.dumps(doc, indent=2))
    if args.contour:
        pts = mainlobe.eoa_contour(e, args.epsilon, args.model)
        lines = ["delay_s,doppler"] + [f"{a:.9g},{b:.9g}" for a, b in pts]
        Path(args.contour).write_text("\n".join(lines) + "\n")
        if not args.no_plot:
            plotting.render_curve(pts[:, 0] * 1e3, pts[:, 1], _plot_path(args.contour),
                                  "delay (ms)", "doppler", f"EOA contour eps={args.epsilon}")
    return 0


def cmd_psl_sweep(args) -> int:
    doc = json.loads(Path(args.base).read_text() if Path(args.base).exists() else args.base)
    base = descriptors.gsfm_params_from(doc)
    res = metrics.psl_sweep(
        base,
        cycles_grid=_parse_range(args.cycles),
        rho_grid=_parse_range(args.rho),
        model=args.model,
        velocities=_velocities(args),
        c=args.c,
    )
    Path(args.out).write_text(metrics.sweep_to_csv(res))
    summary = args.summary or str(Path(args.out).with_suffix(".json"))
    Path(summary).write_text(metrics.sweep_summary(res))
    if not args.no_plot:
        plotting.render_sweep(res, _plot_path(args.out))
    return 0


def cmd_mmf(args) -> int:
    w = descriptors.load_waveform(args.waveform, seed=args.seed)
    vel = _velocities(args)
    if args.search:
        best, trace = mmf.mmf_grid_search(w, model=args.model, velocities=vel, c=args.c)
        Path(args.out).write_text(best.to_json())
        if args.trace:
            Path(args.trace).write_text(mmf.trace_to_csv(trace))
        return 0
    filt = mmf.design_mmf(w, args.alpha_k, args.alpha_t)
    rep = mmf.mmf_report(w, filt, model=args.model, velocities=vel, c=args.c)
    rep = mmf.MmfReport(**{**asdict(rep), "alpha_k": args.alpha_k, "alpha_t": args.alpha_t})
    Path(args.out).write_text(rep.to_json())
    if not args.no_plot:
        caf = ambiguity.xaf(w, filt, model=args.model, velocities=vel, c=args.c)
        plotting.render_surface(caf, _plot_path(args.out), title=f"MMF CAF: {w.label}")
    return 0


def cmd_cas(args) -> int:
    doc = json.loads(Path(args.scenario).read_text())
    scen = descriptors.scenario_from(doc)
    pulses, info = descriptors.train_from(doc["train"])
    train = cas.concat_train(pulses, info["t_pri"])
    rx, fs, ref = cas.synth_scenario_echo(scen, train, seed=args.seed)
    vdoc = doc.get("velocities", {})
    vel = np.arange(vdoc.get("min", -10.0), vdoc.get("max", 10.0) + 1e-9, vdoc.get("step", 0.5))
    out = cas.mf_bank_process(
        rx, fs, pulses, info["t_pri"], args.strategy, vel,
        b_sys=info["b_sys"], c=scen.sound_speed,
        m_coherent=args.m, n_revisits=args.revisits,
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    peaks = []
    for r in range(len(out.revisits)):
        (outdir / f"revisit_{r:02d}.csv").write_text(cas.revisit_to_csv(out, r))
        peaks.append(cas.detect_peaks(out, r, args.threshold))
        if not args.no_plot:
            plotting.render_revisit(out, r, str(outdir / f"revisit_{r:02d}.png"))
    (outdir / "summary.json").write_text(cas.summary_json(out, peaks))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gsfmkit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        p.add_argument("--out", required=True)
        p.add_argument("--no-plot", action="store_true")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--c", type=float, default=1500.0)
        p.add_argument("--vmax", type=float, default=20.0)
        p.add_argument("--vstep", type=float, default=0.25)
        if model:
            p.add_argument("--model", default="broadband",
                           choices=["broadband", "narrowband"])

    p = sub.add_parser("synth", help="generate a waveform from a descriptor")
    p.add_argument("--spec", required=True)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    common(p, model=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("spectrum", help="energy density spectrum")
    p.add_argument("--waveform", required=True)
    common(p, model=False)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("af", help="ambiguity surface (numeric or analytic)")
    p.add_argument("--waveform", required=True)
    p.add_argument("--analytic", action="store_true")
    p.add_argument("--json-out")
    common(p)
    p.set_defaults(func=cmd_af)

    p = sub.add_parser("qfunc", help="Q-function curve")
    p.add_argument("--waveform", required=True)
    common(p)
    p.set_defaults(func=cmd_qfunc)

    p = sub.add_parser("eoa", help="mainlobe ellipse parameters")
    p.add_argument("--waveform", required=True)
    p.add_argument("--closed", action="store_true")
    p.add_argument("--contour")
    p.add_argument("--epsilon", type=float, default=0.5)
    common(p)
    p.set_defaults(func=cmd_eoa)

    p = sub.add_parser("psl-sweep", help="PSL over the (cycles, rho) plane")
    p.add_argument("--base", required=True)
    p.add_argument("--rho", required=True, help="start:step:stop")
    p.add_argument("--cycles", required=True, help="start:step:stop")
    p.add_argument("--summary")
    common(p)
    p.set_defaults(func=cmd_psl_sweep)

    p = sub.add_parser("mmf", help="mismatched-filter design report")
    p.add_argument("--waveform", required=True)
    p.add_argument("--alpha-k", type=float, default=14.0)
    p.add_argument("--alpha-t", type=float, default=0.6)
    p.add_argument("--search", action="store_true")
    p.add_argument("--trace")
    common(p)
    p.set_defaults(func=cmd_mmf)

    p = sub.add_parser("cas", help="CAS scenario simulation")
    p.add_argument("--scenario", required=True)
    p.add_argument("--strategy", default="spcpi", choices=["fcpi", "spcpi", "acpi"])
    p.add_argument("--m", type=int, default=None, help="ACPI coherent pulse count")
    p.add_argument("--revisits", type=int, default=2)
    p.add_argument("--threshold", type=float, default=-12.0)
    common(p, model=False)
    p.set_defaults(func=cmd_cas)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical-domain error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
