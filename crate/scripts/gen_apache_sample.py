#!/usr/bin/env python3
"""Regenerates data/apache_sample_2k.log deterministically.

The bundled sample mimics the shape of an Apache httpd error log: a handful
of fixed message templates, bursty repetition, monotonically advancing
timestamps, and small drifting numeric variables. It exists so tests and
demos work offline; fetch the real public corpora with
scripts/fetch_loghub.sh when you want dataset-faithful numbers.
"""

import datetime
import random
from pathlib import Path

LINES = 2000
SEED = 20051204

out_path = Path(__file__).resolve().parent.parent / "data" / "apache_sample_2k.log"


def main() -> None:
    rng = random.Random(SEED)
    t = datetime.datetime(2005, 12, 4, 4, 47, 44)
    pid = rng.randint(1000, 7999)
    lines = []

    def ts() -> str:
        return t.strftime("[%a %b %d %H:%M:%S %Y]")

    while len(lines) < LINES:
        burst = rng.choice(["init", "worker", "forbidden", "segfault"])
        if burst == "worker":
            # Alternating notice/error pairs, the dominant pattern.
            for _ in range(rng.randint(2, 14)):
                lines.append(f"{ts()} [notice] workerEnv.init() ok /etc/httpd/conf/workers2.properties")
                if rng.random() < 0.85:
                    state = rng.choice([6, 6, 6, 7, 8, 9])
                    lines.append(f"{ts()} [error] mod_jk child workerEnv in error state {state}")
                t += datetime.timedelta(seconds=rng.randint(0, 4))
        elif burst == "init":
            for _ in range(rng.randint(1, 6)):
                pid += rng.randint(1, 3)
                slot = rng.randint(1, 10)
                lines.append(f"{ts()} [notice] jk2_init() Found child {pid} in scoreboard slot {slot}")
                t += datetime.timedelta(seconds=rng.randint(0, 2))
        elif burst == "forbidden":
            ip = f"{rng.randint(10, 222)}.{rng.randint(0, 255)}.{rng.randint(0, 255)}.{rng.randint(1, 254)}"
            for _ in range(rng.randint(1, 4)):
                lines.append(f"{ts()} [error] [client {ip}] Directory index forbidden by rule: /var/www/html/")
                t += datetime.timedelta(seconds=rng.randint(1, 30))
        else:
            pid += rng.randint(1, 40)
            lines.append(f"{ts()} [notice] child pid {pid} exit signal Segmentation fault (11)")
            if rng.random() < 0.5:
                lines.append(f"{ts()} [error] mod_jk child init 1 -2")
            t += datetime.timedelta(seconds=rng.randint(5, 120))

    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(lines[:LINES]) + "\n", encoding="ascii")
    print(f"wrote {out_path} ({out_path.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
