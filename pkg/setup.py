#!/usr/bin/env python3
"""
Bootstrap for the GREM Laboratory

Installs the numerical stack, checks that the SciPy routines the lab relies
on are present, writes a .env from env.example, then smoke-tests the
command line on the bundled model files. Pass --with-tests to also run the
fast pytest suite.
"""

import os
import shutil
import subprocess
import sys

MIN_PYTHON = (3, 9)
SMOKE_RUNS = [
    ("phase census of the two-level model",
     ["src/main.py", "--manifest-dir", ".smoke", "phase", "--model", "models/grem2.json",
      "--grid", "-3,3,-3,3,60,60", "--census", "--out", ".smoke/census.json"]),
    ("exact moments of the REM",
     ["src/main.py", "--manifest-dir", ".smoke", "moments", "--model", "models/rem.json",
      "--n", "8", "--beta", "0.3+0.8i", "--out", ".smoke/moments.json"]),
    ("continuous-hierarchy limit",
     ["src/main.py", "--manifest-dir", ".smoke", "crem", "--A", "models/profile.json",
      "--alpha", "2.718281828", "--beta", "1.1+0.2i", "--out", ".smoke/crem.json"]),
]


def step(description, args):
    """Run one bootstrap step with the current interpreter"""
    print(f"🔄 {description}...")
    try:
        subprocess.run([sys.executable] + args, check=True, capture_output=True, text=True)
    except subprocess.CalledProcessError as e:
        print(f"❌ {description} failed (exit {e.returncode})")
        for stream, text in (("stdout", e.stdout), ("stderr", e.stderr)):
            if text:
                print(f"{stream}: {text.strip()[-2000:]}")
        return False
    print(f"✅ {description}")
    return True


def python_ok():
    found = sys.version_info
    if found < MIN_PYTHON:
        print(f"❌ Python {MIN_PYTHON[0]}.{MIN_PYTHON[1]}+ needed, this is {found.major}.{found.minor}")
        return False
    print(f"🐍 Python {found.major}.{found.minor}.{found.micro}")
    return True


def numerics_ok():
    snippet = ("import numpy, scipy; "
             "from scipy.special import wofz, ndtri, logsumexp; "
             "from scipy.optimize import newton; "
             "from scipy.stats import ks_2samp, kstest; "
             "numpy.random.Philox(numpy.random.SeedSequence(0, spawn_key=(1,))); "
             "print(numpy.__version__, scipy.__version__)")
    return step("Checking NumPy/SciPy routines", ["-c", snippet])


def ensure_env():
    """Copy env.example to .env unless one is already there"""
    if os.path.exists(".env"):
        print("✅ Keeping existing .env")
        return True
    if not os.path.exists("env.example"):
        print("❌ env.example is missing")
        return False
    shutil.copyfile("env.example", ".env")
    print("✅ Wrote .env from env.example")
    return True


def smoke_runs():
    os.makedirs(".smoke", exist_ok=True)
    env_db = os.environ.get("GREM_RUN_DB")
    os.environ["GREM_RUN_DB"] = os.path.join(".smoke", "runs.db")
    try:
        return all(step(f"Smoke run: {label}", args) for label, args in SMOKE_RUNS)
    finally:
        if env_db is None:
            os.environ.pop("GREM_RUN_DB", None)
        else:
            os.environ["GREM_RUN_DB"] = env_db


def main():
    with_tests = "--with-tests" in sys.argv[1:]
    print("🌡️  GREM Laboratory Bootstrap")
    print("=" * 40)

    stages = [
        ("interpreter", python_ok),
        ("dependencies", lambda: step("Installing requirements", ["-m", "pip", "install", "-r", "requirements.txt"])),
        ("numerical stack", numerics_ok),
        ("configuration", ensure_env),
        ("smoke runs", smoke_runs),
        ("demo", lambda: step("Running the offline demo", ["src/demo.py"])),
    ]
    if with_tests:
        stages.append(("tests", lambda: step("Fast test suite", ["-m", "pytest", "-m", "not slow", "-q"])))

    for name, stage in stages:
        if not stage():
            print(f"❌ Bootstrap stopped at: {name}")
            sys.exit(1)

    print("\n" + "=" * 40)
    print("🎉 Laboratory ready")
    print("\nTry:")
    print("   python3 src/main.py phase --model models/grem2.json --out phases.csv")
    print("   python3 src/main.py runs")
    if not with_tests:
        print("   python3 setup.py --with-tests")


if __name__ == "__main__":
    main()
