"""Finite-difference gradient checking shared by several test modules."""

import numpy as np

from chanforecast.nn import ParamStore
from chanforecast.numerics import finite_diff_grad, max_relative_error, relative_scale_eps


def random_store(specs, seed, scale=0.5):
    rng = np.random.default_rng(seed)
    return ParamStore({s.name: scale * rng.standard_normal(s.shape) for s in specs})


def check_param_grads(params, loss_fn, analytic_fn):
    """Max relative error between analytic and central-difference parameter gradients.

    Steps are 1e-5 relative to each parameter, near the cube root of machine
    epsilon that balances truncation against roundoff. Entries far below the
    largest gradient are compared against a floor of 1e-6 of that maximum.
    """
    flat0 = params.flat()

    def f(p):
        params.set_flat(p)
        return loss_fn()

    numeric = finite_diff_grad(f, flat0, relative_scale_eps(flat0, base=1e-5))
    params.set_flat(flat0)
    params.zero_grad()
    analytic_fn()
    analytic = params.flat_grad()
    floor = 1e-6 * max(1.0, np.abs(numeric).max())
    return max_relative_error(analytic, numeric, floor)
