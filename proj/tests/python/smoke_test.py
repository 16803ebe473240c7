"""End-to-end smoke test of the python bindings."""

import json
import math
import os
import tempfile

import _clforge as cl


def test_xor_training_and_forgetting():
    ts = cl.build_stream(d=10, K=2, n_train=200, n_test=300, sigma=0.1 / math.sqrt(10), seed=7)
    assert ts.num_tasks == 2
    assert ts.train[0].X.shape == (200, 10)
    assert set(ts.train[0].y.tolist()) <= {-1.0, 1.0}

    model = cl.ModelConfig(m=64, activation="quadratic")
    train = cl.TrainConfig(eta=1.0, T=40, eval_every=10)
    rec = cl.train_stream(ts, train, model, loss="linear", seed=3)
    assert len(rec.snapshots) == 3
    assert len(rec.loss_trace[0]) == 40

    entries = cl.forgetting(rec, ts, activation="quadratic", loss="linear")
    assert len(entries) == 3
    for e in entries:
        assert abs(e.f_ts - (e.f_tr + e.gen_gap + e.pre_gap)) < 1e-12

    rec2 = cl.train_stream(ts, train, model, loss="linear", seed=3)
    assert (rec.final_params().W == rec2.final_params().W).all()


def test_alpha_and_bounds():
    eta, lam = 0.1, 0.5
    acc = 0.0
    for t in range(1, 101):
        acc = (1 - eta * lam) * acc + 1.0
    assert abs(cl.alpha_t(eta, lam, 100) - acc) < 1e-12 * acc
    assert cl.thm1_forgetting_bound(50, 1000, 1e6, 100, 3, 1, 1.0) > 0
    b_early = cl.thm3_gen_gap_bound(50, 1000, 1e6, 100, 3, 1, 1.0)
    b_late = cl.thm3_gen_gap_bound(50, 1000, 1e6, 100, 3, 3, 1.0)
    assert b_early > b_late


def test_margin_and_u_statistic():
    spec = cl.make_task_spec(d=16, k=1, sigma=0.0)
    mean, se = cl.ntk_margin_mc(spec, spec.mu_plus, 1.0, 20000, seed=9)
    assert mean > 3 * se > 0

    data = cl.sample_xor(spec, 500, seed=11)
    u = cl.u_statistic(data, data.X[0])
    assert math.isfinite(u)


def test_mnist_reader():
    mnist_dir = os.environ["CLFORGE_MNIST_DIR"]
    ds = cl.load_mnist_pair(
        os.path.join(mnist_dir, "train-images-idx3-ubyte"),
        os.path.join(mnist_dir, "train-labels-idx1-ubyte"),
        digit_a=0, digit_b=1, n=64,
    )
    assert ds.X.shape == (64, 784)
    assert ds.X.max() <= 1.0
    assert set(ds.y.tolist()) == {-1.0, 1.0}


def test_run_config_writes_outputs():
    cfg = {
        "seed": 2, "seeds": 2, "loss": "linear",
        "data": {"kind": "xor", "d": 8, "K": 2, "n_train": 80, "n_test": 100,
                 "sigma_coeff": 0.1},
        "model": {"kind": "finite", "m": 16, "activation": "quadratic"},
        "train": {"eta": 0.5, "T": 10, "eval_every": 5},
        "sweep": {"data.n_train": [40, 80]},
    }
    with tempfile.TemporaryDirectory() as tmp:
        n_runs = cl.run_config(json.dumps(cfg), tmp, jobs=2)
        assert n_runs == 4
        with open(os.path.join(tmp, "results.csv")) as f:
            header = f.readline().strip()
        assert header == "run_id,seed,phase_task,iter,eval_task,split,loss,err"
        with open(os.path.join(tmp, "report.csv")) as f:
            header = f.readline().strip()
        assert header == "run_id,k,K_prime,f_tr,f_ts,gen_gap,pre_gap,f_tr_err,f_ts_err"
        assert os.path.exists(os.path.join(tmp, "meta.json"))


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok: {test.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
