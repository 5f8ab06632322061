import os

# Defaults for the resource caps. Each can be overridden by an environment
# variable of the same name prefixed with ``SPARSEQREM_``.
_DEFAULTS = {
    "MAX_SUBSPACE": 2**20,
    "MAX_DENSE_ENTRIES": 2**30,
    "FULL_MATRIX_QUBITS": 14,
    "SUPPORT_CAP": 2**20,
}


def cap(name: str) -> int:
    raw = os.environ.get("SPARSEQREM_" + name)
    if raw is None:
        return _DEFAULTS[name]
    return int(raw)
