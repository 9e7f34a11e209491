"""Central numerical defaults.

Every grid size, tolerance and branch choice used by the library and the
command line lives here so that an acceptance run is reproducible from a
single place.  ``DEFAULTS`` is also written verbatim into every CLI report.
"""

SCHEMA_VERSION = 1

DEFAULTS = {
    # mellin_core
    "log_grid": {"t_min": 1e-6, "t_max": 1e6, "n": 2048},
    "decay_threshold": 1e-10,
    "quad_epsabs": 1e-12,
    "quad_limit": 400,
    "pv_window_nodes": 8.0,
    # symbol_calculus
    "gamma": [0.0, 1.0],
    "edge_samples": 4097,
    # fredholm_analysis
    "ellipticity_tol": 1e-8,
    "winding_residual": 0.25,
    "scan_xi_samples": 4097,
    "scan_anchor_r": -0.5,
    # bie_solver
    "solver_beta": 0.25,
    "solver_grid": {"t_min": 1e-16, "t_max": 1e12, "n": 2048},
    "nystrom_ratio": 1.15,
    "nystrom_nodes": 512,
    "nystrom_max_cond": 1e12,
    "spectral_padding": 2,
    # potential_theory
    "boundary_grid": {"scale": 1.0, "t_max": 1e8, "n": 4097},
    "fd_order": 4,
    "log_window_nodes": 6.0,
    "zero_mean_tol": 1e-6,
    "pipeline_grid": {"t_min": 1e-16, "t_max": 1e48, "n": 4096},
    "pipeline_beta": 0.75,
    "plemelj_heights": [0.1, 0.05, 0.025],
    "probe_x1": [-2.0, -1.0, 0.0, 1.0, 2.0],
    "probe_x2": [0.25, 0.5, 1.0, 2.0, 4.0],
    "bump_amplitudes": [0.8, -0.6],
    "newton_nodes": 160,
}


def get(key):
    """Return a copy of a default so callers cannot mutate the table."""
    val = DEFAULTS[key]
    if isinstance(val, dict):
        return dict(val)
    if isinstance(val, list):
        return list(val)
    return val


def default_gamma():
    re, im = DEFAULTS["gamma"]
    return complex(re, im)
