"""tntm: probabilistic topic modelling with Gaussian topics in embedding space.

Submodules are imported lazily so the command-line entry point can pin the
BLAS thread count before numpy loads.
"""

__version__ = "0.1.0"

_SUBMODULES = (
    "cli",
    "corpus",
    "encoder",
    "errors",
    "gmm",
    "metrics",
    "model",
    "numkernel",
    "synth",
    "tensorio",
    "train",
)


def __getattr__(name):
    if name in _SUBMODULES:
        import importlib

        module = importlib.import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(list(globals()) + list(_SUBMODULES))
