"""Smoke test for the Python bindings.

Build and install the extension first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/vdtp_tune-*.whl
"""

import vdtp_tune as vt


def main():
    urban = vt.Scenario.preset("urban")
    human = vt.VdtpConfig.human_expert("urban")
    assert human.quantize() == (25600, 8, 8.0)

    sim = vt.simulate(human, urban, replications=3, seed=1)
    assert len(sim["replications"]) == 3
    assert sim["fitness"] > 0
    assert sim["fitness"] == vt.evaluate(human, urban, replications=3, seed=1)

    try:
        vt.Bounds().check(vt.VdtpConfig(100, 8, 8))
    except ValueError as e:
        assert "chunk_size" in str(e)
    else:
        raise AssertionError("chunk below 128 accepted")

    run = vt.tune("pso", urban, budget=40, replications=1, seed=3)
    assert len(run["trace"]) == 40
    assert all(b <= a for a, b in zip(run["trace"], run["trace"][1:]))
    assert run["best_fitness"] == run["trace"][-1]

    x, f, trace = vt.minimize("de", lambda p: sum(v * v for v in p), [(-5, 5)] * 2, budget=200, seed=1)
    assert len(trace) == 200 and f == trace[-1] and f < 1.0

    bench = vt.run_bench("pso", "sphere", dims=3, budget=1000, runs=5, seed=2)
    assert bench["summary"]["median"] < bench["random_summary"]["median"]

    assert vt.summarize([1.0, 2.0, 3.0])["median"] == 2.0
    w = vt.wilcoxon([1, 2, 3, 4, 5, 6, 7, 8], [2, 3, 4, 5, 6, 7, 8, 9.5])
    assert w["p_value"] == 2 / 256 and w["significant_at_05"]
    fr = vt.friedman([[1, 2, 3], [1, 3, 2], [1, 2, 3], [1, 3, 2]])
    assert fr["mean_ranks"] == [1.0, 2.5, 2.5]

    print("python smoke test passed")


if __name__ == "__main__":
    main()
