"""Hot loop for one sample exposure: two LIF layers, synaptic traces, online plasticity.

The compiled ``_sim`` extension is used when it was built; otherwise the
pure-Python ``_sim_py`` module takes over with identical results. Setting
``SHLSNN_PURE_PYTHON=1`` forces the fallback.

``run_exposure(i_in, w, bias, p, learn, counts, rec=None) -> status``

* ``i_in`` (M,) constant input-layer currents
* ``w`` (M, N) C-contiguous float64 weights, updated in place when ``learn``
* ``bias`` (N,) constant currents added to the output layer
* ``p`` packed parameters, see :data:`PARAM_NAMES`
* ``counts`` (M + N,) int64 spike counters, incremented in place
* ``rec`` optional (M + N, n_steps) int32 buffer receiving spike step indices
  (a spike at index ``k`` happened at time ``k * dt``)

Returns 0, or 1 if any membrane potential ended non-finite.
"""

from __future__ import annotations

import os

from . import _sim_py

PARAM_NAMES = (
    "dt", "n_steps",
    "c_in", "g_in", "el_in", "vt_in",
    "c_out", "g_out", "el_out", "vt_out",
    "exc_i0", "exc_tau_m", "exc_tau_s",
    "inh_i0", "inh_tau_m", "inh_tau_s",
    "lateral_weight",
    "a_up", "a_down", "mu", "tau_up", "tau_down", "w_max",
)

python_run_exposure = _sim_py.run_exposure

try:
    from ._sim import run_exposure as compiled_run_exposure
except ImportError:  # extension not built
    compiled_run_exposure = None

if compiled_run_exposure is not None and os.environ.get("SHLSNN_PURE_PYTHON", "") in ("", "0"):
    run_exposure = compiled_run_exposure
    BACKEND = "cython"
else:
    run_exposure = python_run_exposure
    BACKEND = "python"

__all__ = ["BACKEND", "PARAM_NAMES", "run_exposure", "compiled_run_exposure", "python_run_exposure"]
