"""Free group algebra norms, tower discrimination and permutation experiments."""

from ._residua import (
    Basis,
    Bracket,
    Certificate,
    Element,
    Preset,
    Word,
    baumslag_search,
    baumslag_sweep,
    certify,
    choose_m,
    degree,
    discriminate,
    klein_norm,
    op_norm,
    permrep_experiment,
    preset,
    random_free_rep,
    sandwich,
    zr_norm,
)

__all__ = [
    "Basis",
    "Bracket",
    "Certificate",
    "Element",
    "Preset",
    "Word",
    "baumslag_search",
    "baumslag_sweep",
    "certify",
    "choose_m",
    "degree",
    "discriminate",
    "klein_norm",
    "op_norm",
    "permrep_experiment",
    "preset",
    "random_free_rep",
    "sandwich",
    "zr_norm",
]
