#!/usr/bin/env python3
"""Convert four-part Bach chorales from the music21 corpus into JSON scores.

Each output file follows the JSON score schema read by `tonal analyze` and
`tonal dataset build`: one slice per beat, the soprano as melody and every
pitch class sounding on the beat onset as the chord.

    python3 tools/chorales_to_json.py --out tests/data/chorales --limit 60
"""

import argparse
import json
import pathlib
import sys

from music21 import corpus

VOICES = ("Soprano", "Alto", "Tenor", "Bass")
LABELS = ("C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B")


def _voice_parts(score):
    by_name = {}
    for part in score.parts:
        name = (part.partName or "").strip()
        if name in VOICES and name not in by_name:
            by_name[name] = part
    if len(by_name) != len(VOICES):
        return None
    return [by_name[v] for v in VOICES]


def _timeline(part):
    """List of (onset, end, midi) for sounding notes, ties merged."""
    events = []
    for n in part.stripTies().flatten().notes:
        if n.isChord:
            midis = [p.midi for p in n.pitches]
        else:
            midis = [n.pitch.midi]
        onset = float(n.offset)
        end = onset + float(n.quarterLength)
        for m in midis:
            events.append((onset, end, m))
    return events


def _sounding(events, t):
    return [e for e in events if e[0] <= t < e[1]]


def convert(path):
    score = corpus.parse(path)
    parts = _voice_parts(score)
    if parts is None:
        return None
    ts = score.recurse().getElementsByClass("TimeSignature").first()
    if ts is None:
        return None
    beat = float(ts.beatDuration.quarterLength)
    measures = list(parts[0].getElementsByClass("Measure"))
    downbeats = {float(m.offset) for m in measures if float(m.paddingLeft) == 0.0}
    timelines = [_timeline(p) for p in parts]
    end = max(e[1] for tl in timelines for e in tl)
    start = min(e[0] for e in timelines[0])

    slices = []
    t = start
    while t < end - 1e-9:
        sounding = [_sounding(tl, t) for tl in timelines]
        soprano = sounding[0]
        pitches = sorted({e[2] for voice in sounding for e in voice})
        if soprano and pitches:
            top = max(soprano, key=lambda e: e[2])
            remaining = min(top[1] - t, beat) / beat
            slices.append({
                "melody": {"midi": top[2], "duration_beats": round(remaining, 6)},
                "chord": [LABELS[pc] for pc in sorted({m % 12 for m in pitches})],
                "downbeat": any(abs(t - d) < 1e-9 for d in downbeats),
            })
        t += beat
    if not slices:
        return None
    return {
        "title": pathlib.Path(path).stem,
        "beats_per_bar": int(ts.beatCount),
        "slices": slices,
    }


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--limit", type=int, default=0, help="stop after N chorales (0 = all)")
    args = ap.parse_args(argv)

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = 0
    for path in sorted(corpus.getComposer("bach"), key=lambda p: p.name):
        if path.suffix not in (".mxl", ".xml", ".musicxml"):
            continue
        try:
            doc = convert(path)
        except Exception as exc:  # malformed corpus entries are skipped
            print(f"skip {path.name}: {exc}", file=sys.stderr)
            continue
        if doc is None:
            continue
        (out / f"{doc['title']}.json").write_text(json.dumps(doc, separators=(",", ":")) + "\n")
        written += 1
        if args.limit and written >= args.limit:
            break
    print(f"wrote {written} scores to {out}")


if __name__ == "__main__":
    main(sys.argv[1:])
