"""End-to-end checks of the qlorder command-line tool: outputs and exit codes."""

import math
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = sys.argv[1]


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def expect(cond, message):
    if not cond:
        print("FAIL:", message)
        sys.exit(1)


def main():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)

        preset = run("preset")
        expect(preset.returncode == 0, "preset exits 0")
        expect("[signal]" in preset.stdout and "nu_true = 2" in preset.stdout, "preset dumps the config")
        cfg = tmp / "preset.ini"
        cfg.write_text(preset.stdout)

        theory = run("theory", "--config", str(cfg), "--snr-db", "-12,-8")
        expect(theory.returncode == 0, "theory exits 0")
        lines = theory.stdout.strip().splitlines()
        expect(lines[0] == "snr_db,r,q,rho,p_exact,p_approx,approx_valid", "theory header")
        expect(len(lines) == 3, "one theory row per SNR")
        p12, p8 = (float(line.split(",")[4]) for line in lines[1:])
        expect(p12 > p8 > 0, "theory probability decreases with SNR")

        out = tmp / "sim.csv"
        sim = run("simulate", "--snr-db", "-10", "--trials", "2000", "--seed", "7", "--out", str(out))
        expect(sim.returncode == 0 and sim.stdout == "", "simulate writes to --out")
        row = out.read_text().strip().splitlines()[1].split(",")
        expect(abs(float(row[1]) - float(row[3])) < 5 * math.sqrt(0.25 / 2000), "simulation near theory")
        again = tmp / "sim2.csv"
        run("simulate", "--snr-db", "-10", "--trials", "2000", "--seed", "7", "--threads", "3", "--out", str(again))
        expect(out.read_text() == again.read_text(), "simulation independent of thread count")

        sweep = run("sweep", "--var", "delta_phi", "--grid", "0,0.1,0.2", "--snr-db", "-10")
        expect(sweep.returncode == 0, "sweep exits 0")
        expect(sweep.stdout.splitlines()[1].split(",")[2] == "1", "normalized sweep is 1 at zero")

        worst = run("worstcase", "--snr-db", "-10")
        expect(worst.returncode == 0, "worstcase exits 0")
        p_max, *_, p_zero = (float(v) for v in worst.stdout.splitlines()[1].split(","))
        expect(p_max >= p_zero, "worst case dominates the error-free value")

        doppler = run("doppler", "--delta-omega", "0.02", "--carrier", "0.4", "--wave-speed", "1500")
        expect(doppler.returncode == 0 and float(doppler.stdout) == 75.0, "doppler speed limit")

        samples = tmp / "x.txt"
        samples.write_text("\n".join(str(math.cos(1.2075 * t) * 0.4) for t in range(1, 129)) + "\n")
        est = run("estimate", "--samples", str(samples))
        expect(est.returncode == 0 and est.stdout.strip().isdigit(), "estimate prints an order")

        bad = tmp / "bad.ini"
        bad.write_text("[run]\nnu_true = 2\nbogus = 1\n")
        res = run("theory", "--config", str(bad))
        expect(res.returncode == 1 and "bad.ini:3" in res.stderr, "unknown key reports file and line")

        expect(run("theory", "--config", str(tmp / "missing.ini")).returncode == 1, "missing config exits 1")
        expect(run("sweep", "--var", "nonsense", "--grid", "0").returncode == 1, "bad sweep variable exits 1")
        expect(run().returncode == 1, "no subcommand exits 1")

        degenerate = preset.stdout.replace("[errors]\ndelta_a = 0.25", "[errors]\ndelta_a = -1")
        expect(degenerate != preset.stdout, "degenerate config rewrite applied")
        dcfg = tmp / "degenerate.ini"
        dcfg.write_text(degenerate)
        res = run("theory", "--config", str(dcfg))
        expect(res.returncode == 2, "zero measured amplitude exits 2")

    print("cli: all checks passed")


if __name__ == "__main__":
    main()
