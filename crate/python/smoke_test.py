"""Smoke test for the pyheavyperm extension.

Build first with `cargo build -p heavyperm-py --release`, then run
`python3 python/smoke_test.py [path/to/libpyheavyperm.so]`.
"""

import importlib.machinery
import importlib.util
import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module(explicit=None):
    candidates = [Path(explicit)] if explicit else [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libpyheavyperm.so", "libpyheavyperm.dylib", "pyheavyperm.dll")
    ]
    for path in candidates:
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("pyheavyperm", str(path))
            spec = importlib.util.spec_from_loader("pyheavyperm", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("pyheavyperm library not found; run `cargo build -p heavyperm-py --release`")


def main():
    hp = load_module(sys.argv[1] if len(sys.argv) > 1 else None)

    a = hp.LogMatrix.from_linear_rows([[1.0, 2.0], [3.0, 4.0]])
    for engine in ("auto", "brute", "ryser", "dp"):
        r = hp.perm(a, engine=engine)
        assert abs(r.log_perm - math.log(10.0)) < 1e-12, (engine, r)

    ones = hp.LogMatrix.from_log_rows([[0.0] * 8 for _ in range(8)])
    assert abs(hp.perm(ones).log_perm - math.log(40320.0)) < 1e-9

    m = hp.LogMatrix.generate(6, 6, "pareto:beta=0.5", seed=3)
    exact = hp.perm(m).log_perm
    est = hp.perm(m, engine="sis", samples=50_000, seed=1)
    assert abs(est.log_perm - exact) <= 4 * est.est_stderr_log

    lo = hp.lower_certificate(m, rho=0.5)
    hi = hp.upper_certificate(m)
    assert lo.log_bound <= exact <= hi.log_bound
    assert lo.verify(m) == lo.log_bound
    assert json.loads(lo.to_json())["side"] == "lower"

    saturated, matching, _ = hp.hall_check([[1, 0], [0, 1]])
    assert saturated and matching == [0, 1]
    saturated, _, violator = hp.hall_check([[1, 0], [1, 0]])
    assert not saturated and violator == [0, 1]
    assert abs(hp.mann_ryser_bound([[1, 1, 1]] * 3) - math.log(6.0)) < 1e-12

    assert abs(hp.expected_z(1, 1) - (1 - math.exp(-1))) < 1e-12
    assert hp.tail_exponent("pareto:beta=2", 3.0) == -0.5
    assert hp.height_rule(1000, 1.2) == 30
    assert hp.max_perm_sum(ones) == 0.0

    try:
        hp.perm(hp.LogMatrix.generate(30, 30), engine="ryser")
    except RuntimeError as err:
        assert "24" in str(err)
    else:
        raise AssertionError("ryser accepted n = 30")

    csv = hp.run_converge(json.dumps({"sizes": [4, 6], "trials": 2, "seed": 5}))
    assert csv.splitlines()[0] == "n,m,trial,seed,engine,log_perm,log_lower,log_upper,ratio,target"

    print("pyheavyperm smoke test passed")


if __name__ == "__main__":
    main()
