#!/usr/bin/env python3
"""Straight-line transcription of the appendix state-transition pseudocode.

Writes the 24-step golden traces used by the C++ transition tests. Two
readings differ from the printed pseudocode:
  * action 0 charges C_CHARGE (the printed max(G-L, 0) would charge nothing
    in the deficit hours the action is meant for);
  * energy the action leaves unbalanced is reported as unserved (load not
    covered) or curtailed (generation not used).

Usage: transition_oracle.py OUT_DIR        write the traces
       transition_oracle.py --check DIR    compare against existing files
"""
import sys
from pathlib import Path

C_BAT = 13.5
C_CHARGE = 5.0
ETA = 100.0 / C_BAT


def tau(h):
    if 17 <= h < 19:
        return "P"
    if 15 <= h < 17 or h >= 23 or h < 8:
        return "N"
    return "D"


def step(L, G, soc, h, a):
    t = tau(h)
    buy = sell = charge = discharge = 0.0
    new = soc
    taken = False
    if a == 0:
        if (soc <= 50 and G < L) or (soc <= 50 and t == "N"):
            taken = True
            new = min(soc + C_CHARGE * ETA, 100.0)
            charge = C_CHARGE
            buy = max(L - G, 0.0) + C_CHARGE
        else:
            buy = max(L - G, 0.0)
    elif a == 1:
        if G < L and soc < 10 and t != "N":
            taken = True
            buy = L - G
    elif a == 2:
        if G > L and (soc >= 90 or (soc >= 20 and t == "P")):
            taken = True
            sell = G - L
    elif a == 3:
        if G >= L and ((soc >= 20 and t == "P") or (soc >= 90 and t != "P")):
            taken = True
            kwh = min(C_CHARGE, soc * C_BAT / 100.0)
            new = soc - kwh * ETA
            discharge = kwh
            sell = (G - L) + kwh
    elif a == 4:
        if G < L and soc >= 10:
            taken = True
            deficit = L - G
            kwh = min(C_CHARGE, deficit, soc * C_BAT / 100.0)
            new = soc - kwh * ETA
            discharge = kwh
            buy = deficit - kwh
    elif a == 5:
        # No guard: self-use always runs and moves nothing.
        taken = True
    elif a == 6:
        if G > L and soc <= 80 and t != "P":
            taken = True
            kwh = min(C_CHARGE, G - L)
            new = min(soc + kwh * ETA, 100.0)
            charge = (new - soc) / ETA
    elif a == 7:
        if G < L and soc >= 20:
            taken = True
            need = L - G
            kwh = min(C_CHARGE, need, soc * C_BAT / 100.0)
            new = soc - kwh * ETA
            discharge = kwh
            buy = max(need - kwh, 0.0)
    new = max(0.0, min(new, 100.0))
    imbalance = (L + charge + sell) - (G + discharge + buy)
    unserved = imbalance if imbalance > 1e-12 else 0.0
    curtailed = -imbalance if imbalance < -1e-12 else 0.0
    return new, buy, sell, unserved, curtailed, taken


# name -> (load per hour, generation per hour, action per hour)
TRACES = {
    "deficit": (
        [4.0] * 24,
        [1.0] * 24,
        [4, 4, 4, 4, 4, 4, 1, 1, 0, 0, 7, 7, 0, 7, 7, 7, 0, 2, 3, 6, 5, 7, 0, 4],
    ),
    "solar": (
        [2.0] * 24,
        [0, 0, 0, 0, 0, 0, 0, 1, 3, 5, 7, 8, 9, 9, 8, 7, 5, 4, 3, 0, 0, 0, 0, 0],
        [7, 7, 7, 5, 0, 5, 5, 2, 6, 6, 6, 2, 3, 2, 3, 6, 6, 2, 3, 1, 0, 4, 7, 5],
    ),
    "peak_surplus": (
        [1.5] * 24,
        [0, 0, 0, 0, 0, 0, 0, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 6, 6, 0, 0, 0, 0, 0],
        [3, 4, 4, 4, 4, 4, 4, 6, 6, 6, 7, 6, 6, 6, 3, 2, 6, 2, 3, 4, 4, 1, 0, 0],
    ),
}


def run(load, gen, actions):
    rows = []
    soc = 100.0
    for h in range(24):
        new, buy, sell, unserved, curtailed, taken = step(load[h], gen[h], soc, h, actions[h])
        rows.append((h, load[h], float(gen[h]), soc, actions[h], int(taken), new, buy, sell, unserved, curtailed))
        soc = new
    return rows


HEADER = "hour,load,generation,soc_before,action,taken,soc_after,buy,sell,unserved,curtailed"


def render(rows):
    lines = [HEADER]
    for r in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in r))
    return "\n".join(lines) + "\n"


def coverage(all_rows):
    seen = {a: set() for a in range(8)}
    for rows in all_rows:
        for r in rows:
            seen[r[4]].add(r[5])
    # Action 5 has no guard, so only its taken branch exists.
    missing = [a for a in range(8) if seen[a] != ({1} if a == 5 else {0, 1})]
    if missing:
        raise SystemExit(f"traces do not cover both branches of actions {missing}")


def main(argv):
    check = len(argv) == 3 and argv[1] == "--check"
    if len(argv) != 2 and not check:
        print(__doc__)
        return 2
    out = Path(argv[-1])
    rendered = {name: run(*spec) for name, spec in TRACES.items()}
    coverage(rendered.values())
    status = 0
    for name, rows in rendered.items():
        path = out / f"transition_{name}.csv"
        text = render(rows)
        if check:
            if not path.exists() or path.read_text() != text:
                print(f"mismatch: {path}")
                status = 1
        else:
            out.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
