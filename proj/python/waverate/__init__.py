"""Linear wavelet density estimation for linear processes."""

from ._core import (  # noqa: F401
    ConfigError,
    DomainError,
    Error,
    PreconditionError,
    UnsupportedOrder,
    __version__,
    audit,
    cli,
    daubechies_filter,
    fit_evaluate,
    fit_rate,
    gen_path,
    reference_density,
    run_imse,
    scaling_table,
    scenario_names,
    select_jn,
)
