import io

import numpy as np
import pytest

from chanforecast.nn import (
    AdamState,
    LstmState,
    ParamStore,
    adam_update,
    init_params,
    lstm_sequence_backward,
    lstm_sequence_forward,
    lstm_step,
    mlp2_backward,
    mlp2_forward,
    read_params,
    write_params,
)
from chanforecast.nn.layers import lstm_specs, mlp2_specs
from chanforecast.nn.params import ADJUST_BIAS, ADJUST_WEIGHT, ParamSpec
from chanforecast.numerics import make_rng

from gradcheck import check_param_grads, random_store

SEEDS = [0, 1, 2, 3, 4]


class TestLstmStep:
    def test_zero_params_zero_state(self, rng):
        params = ParamStore({s.name: np.zeros(s.shape) for s in lstm_specs("lstm", 6, 4)})
        out = lstm_step(LstmState.zeros(4), rng.standard_normal(6), params)
        assert np.all(out.c == 0) and np.all(out.z == 0)

    def test_forget_gate_bias(self):
        params = ParamStore({s.name: np.zeros(s.shape) for s in lstm_specs("lstm", 3, 2)})
        b = params["lstm.b"].copy()
        b[2:4] = 10.0  # forget block
        params["lstm.b"] = b
        c0 = np.array([0.7, -1.3])
        out = lstm_step(LstmState(c0, np.zeros(2)), np.ones(3), params)
        # input gate 0.5, candidate tanh(0) = 0
        np.testing.assert_allclose(out.c, 0.9999546021312976 * c0, rtol=1e-12)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient_single_step(self, seed):
        specs = lstm_specs("lstm", 5, 4)
        params = random_store(specs, seed)
        rng = np.random.default_rng(100 + seed)
        x = rng.standard_normal((1, 1, 5))

        def loss():
            z, _ = lstm_sequence_forward(x, params)
            return float(np.sum(z ** 2))

        def analytic():
            z, cache = lstm_sequence_forward(x, params)
            lstm_sequence_backward(2 * z, cache, params)

        assert check_param_grads(params, loss, analytic) < 1e-5

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient_unrolled(self, seed):
        specs = lstm_specs("lstm", 4, 3)
        params = random_store(specs, seed)
        rng = np.random.default_rng(200 + seed)
        xs = rng.standard_normal((2, 6, 4))
        proj = rng.standard_normal(3)

        def loss():
            z, _ = lstm_sequence_forward(xs, params)
            return float(np.sum(np.sin(z @ proj)))

        def analytic():
            z, cache = lstm_sequence_forward(xs, params)
            dz = np.cos(z @ proj)[:, None] * proj[None, :]
            lstm_sequence_backward(dz, cache, params)

        assert check_param_grads(params, loss, analytic) < 1e-5

    def test_step_matches_sequence(self, rng):
        params = random_store(lstm_specs("lstm", 4, 3), 9)
        xs = rng.standard_normal((2, 5, 4))
        st = LstmState.zeros(3, (2,))
        for t in range(5):
            st = lstm_step(st, xs[:, t], params)
        z, _ = lstm_sequence_forward(xs, params)
        np.testing.assert_allclose(st.z, z, atol=1e-14)

    def test_hidden_bounded(self, rng):
        params = random_store(lstm_specs("lstm", 4, 8), 3, scale=5.0)
        z, _ = lstm_sequence_forward(50 * rng.standard_normal((3, 10, 4)), params)
        assert np.all(np.abs(z) < 1)

    def test_shape_mismatch(self, rng):
        params = random_store(lstm_specs("lstm", 4, 3), 0)
        with pytest.raises(ValueError):
            lstm_step(LstmState.zeros(3), rng.standard_normal(5), params)


class TestMlp2:
    def test_zero_input(self, rng):
        params = random_store(mlp2_specs("m", 3, 5, 2), 1)
        out, _ = mlp2_forward(np.zeros(3), params, "m")
        expect = params["m.W2"] @ np.maximum(params["m.b1"], 0) + params["m.b2"]
        np.testing.assert_allclose(out, expect)

    def test_dead_hidden_layer(self, rng):
        params = random_store(mlp2_specs("m", 3, 5, 2), 1)
        params["m.W1"] = np.zeros((5, 3))
        params["m.b1"] = -np.ones(5)
        out, _ = mlp2_forward(rng.standard_normal(3), params, "m")
        np.testing.assert_array_equal(out, params["m.b2"])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient(self, seed):
        params = random_store(mlp2_specs("m", 4, 6, 3), seed)
        rng = np.random.default_rng(300 + seed)
        x = rng.standard_normal((5, 4))
        proj = rng.standard_normal(3)

        def loss():
            out, _ = mlp2_forward(x, params, "m")
            return float(np.sum((out @ proj) ** 2))

        def analytic():
            out, cache = mlp2_forward(x, params, "m")
            mlp2_backward(2 * (out @ proj)[:, None] * proj[None, :], cache, params, "m")

        assert check_param_grads(params, loss, analytic) < 1e-5

    def test_shape_mismatch(self):
        params = random_store(mlp2_specs("m", 4, 6, 3), 0)
        with pytest.raises(ValueError):
            mlp2_forward(np.zeros(5), params, "m")


class TestAdam:
    def test_zero_gradient_first_step(self):
        params = ParamStore({"p": np.array([1.0, -2.0])})
        opt = AdamState.for_params(params, lr=0.1)
        adam_update(params, {"p": np.zeros(2)}, opt)
        np.testing.assert_array_equal(params["p"], [1.0, -2.0])
        np.testing.assert_array_equal(opt.m["p"], 0)
        np.testing.assert_array_equal(opt.v["p"], 0)
        assert opt.t == 1

    @pytest.mark.parametrize("g", [0.3, -7.0, 1e-3])
    def test_first_step_magnitude(self, g):
        lr, eps = 0.01, 1e-8
        params = ParamStore({"p": np.array([0.5])})
        opt = AdamState.for_params(params, lr=lr, eps=eps)
        adam_update(params, {"p": np.array([g])}, opt)
        update = params["p"][0] - 0.5
        assert abs(update + lr * g / (abs(g) + eps)) < 1e-9

    def test_converges_on_quadratic(self):
        params = ParamStore({"p": np.array([5.0, 5.0])})
        opt = AdamState.for_params(params, lr=0.1)
        for _ in range(200):
            adam_update(params, {"p": 2 * params["p"]}, opt)
        assert np.linalg.norm(params["p"]) < 0.5

    def test_sign_flip_symmetry(self, rng):
        g = rng.standard_normal(6)
        p1 = ParamStore({"p": np.zeros(6)})
        p2 = ParamStore({"p": np.zeros(6)})
        adam_update(p1, {"p": g}, AdamState.for_params(p1))
        adam_update(p2, {"p": -g}, AdamState.for_params(p2))
        np.testing.assert_array_equal(p1["p"], -p2["p"])

    def test_step_counter(self):
        params = ParamStore({"p": np.zeros(2)})
        opt = AdamState.for_params(params)
        for i in range(5):
            adam_update(params, {"p": np.ones(2)}, opt)
            assert opt.t == i + 1

    def test_non_finite_gradient(self):
        params = ParamStore({"p": np.zeros(2)})
        with pytest.raises(FloatingPointError):
            adam_update(params, {"p": np.array([np.nan, 0.0])}, AdamState.for_params(params))


class TestInitAndStore:
    SPECS = [
        ParamSpec("a.W", (30, 100)),
        ParamSpec("a.b", (30,), "bias"),
        ParamSpec("h.W2", (8, 4), ADJUST_WEIGHT),
        ParamSpec("h.b2", (8,), ADJUST_BIAS),
    ]

    def test_deterministic(self):
        a = init_params(self.SPECS, make_rng(5))
        b = init_params(self.SPECS, make_rng(5))
        assert a.flat().tobytes() == b.flat().tobytes()

    def test_bounds_and_roles(self):
        p = init_params(self.SPECS, make_rng(1))
        assert np.all(np.abs(p["a.W"]) <= 0.1)
        np.testing.assert_array_equal(p["a.b"], 0)
        np.testing.assert_array_equal(p["h.b2"], 1)
        assert np.all(np.abs(p["h.W2"]) <= 0.01 * 0.5)

    def test_mean_of_million_weights(self):
        p = init_params([ParamSpec("w", (1000, 1000))], make_rng(3))
        # uniform(-b, b) has std b/sqrt(3)
        se = (1 / np.sqrt(1000)) / np.sqrt(3) / np.sqrt(p["w"].size)
        assert abs(p["w"].mean()) < 3 * se

    def test_total_count(self):
        p = init_params(self.SPECS, make_rng(1))
        assert p.total_count == 3000 + 30 + 32 + 8
        assert p.total_count == p.total_count  # side-effect free

    def test_duplicate_names(self):
        with pytest.raises(ValueError):
            ParamStore([("x", np.zeros(1)), ("x", np.zeros(2))])

    def test_shape_is_fixed(self):
        p = ParamStore({"x": np.zeros(3)})
        with pytest.raises(ValueError):
            p["x"] = np.zeros(4)


class TestCheckpoint:
    def test_bit_exact_round_trip(self):
        p = init_params(TestInitAndStore.SPECS, make_rng(11))
        p["a.b"] = np.linspace(-1, 1, 30) * np.pi
        buf = io.BytesIO()
        write_params(p, buf)
        buf.seek(0)
        q = read_params(buf)
        assert q.names() == p.names()
        for name in p:
            assert q[name].shape == p[name].shape
            assert q[name].tobytes() == p[name].tobytes()

    def test_header(self):
        buf = io.BytesIO()
        write_params(ParamStore({"w": np.ones((2, 3))}), buf)
        raw = buf.getvalue()
        assert raw[:4] == b"CFNN"
        assert int.from_bytes(raw[4:8], "little") == 1
        assert int.from_bytes(raw[8:12], "little") == 1
        # name length, name, rank, dims, payload
        assert len(raw) == 12 + 4 + 1 + 1 + 8 + 6 * 8

    def test_bad_magic(self):
        with pytest.raises(ValueError):
            read_params(io.BytesIO(b"XXXX"))
