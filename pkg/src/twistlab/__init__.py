"""Exact Dehn-twist calculus for genus-0 and genus-1 fibered surfaces.

The package is organized bottom-up:

* :mod:`twistlab.fatgroup` -- free-group words, automorphisms, and marked
  mapping classes (the exact data structure certifying twist identities).
* :mod:`twistlab.surfaces` -- planar and one-handle surface models with a
  catalog of simple closed curves, their twists, homology, and windings.
* :mod:`twistlab.mcgword` -- positive factorizations as words in twists,
  elementary moves, and the verified relation library.
* :mod:`twistlab.fourman` -- invariants of the Lefschetz filling: Euler
  characteristic, first homology, intersection lattice, adjunction.
* :mod:`twistlab.families` -- the plumbing families, their factorizations,
  and the mechanical derivations rewriting them to minimal positive words.
* :mod:`twistlab.cli` -- the ``twistlab`` command line front end.
"""

from .fatgroup import (
    FreeAut,
    MarkedClass,
    Word,
    mclass_abelianize,
    mclass_compose,
    mclass_equal,
    word_reduce,
)

__version__ = "0.1.0"

__all__ = [
    "FreeAut",
    "MarkedClass",
    "Word",
    "mclass_abelianize",
    "mclass_compose",
    "mclass_equal",
    "word_reduce",
    "__version__",
]
