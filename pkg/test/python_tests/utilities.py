#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os
import sys

import numpy as np

ALPHA = 0.55
BETA = float(np.sqrt(1 - ALPHA**2))


def execution_path(filename):
    return os.path.join(os.path.dirname(sys._getframe(1).f_code.co_filename), filename)


def max_abs_diff(a, b):
    """
    Largest entry of |a − b| for matrix-likes.

    >>> max_abs_diff(np.eye(2), np.eye(2))
    0.0

    >>> max_abs_diff([[1, 0], [0, 1]], [[1, 0], [0, 0.5]])
    0.5
    """
    return float(np.max(np.abs(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex))))


def random_hermitian(rng, dim=4):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (m + m.conj().T)


def random_psd(rng, dim=4):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return g @ g.conj().T


def random_xstate(rng):
    """
    Random physical X-state as (populations, coh_hhvv, coh_hvvh, matrix).

    Coherences are real and bounded by the geometric mean of their populations.
    """
    pops = rng.dirichlet(np.ones(4))
    c1 = rng.uniform(-1, 1) * np.sqrt(pops[0] * pops[3])
    c2 = rng.uniform(-1, 1) * np.sqrt(pops[1] * pops[2])
    m = np.diag(pops).astype(complex)
    m[0, 3] = m[3, 0] = c1
    m[1, 2] = m[2, 1] = c2
    return pops, c1, c2, m


def pure_family_trajectory(alpha, P):
    """Closed-form concurrence of α|HH⟩ − β|VV⟩ under the product damping channel."""
    beta = np.sqrt(1 - alpha**2)
    return 2 * (1 - P) * max(0.0, alpha * beta - beta**2 * P)
