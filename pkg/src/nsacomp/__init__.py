"""Workbench for extracting computational content from nonstandard proofs.

Submodules:

* :mod:`nsacomp.terms` -- finite types, the term language and its evaluator
* :mod:`nsacomp.formulas` -- formulas with ``st``-relativized quantifiers
* :mod:`nsacomp.semantics` -- exhaustive evaluation on finite interpretations
* :mod:`nsacomp.normalizer` -- the rewrite rules producing normal forms
* :mod:`nsacomp.machines` -- oracle register machines, ``f0`` and s-m-n
* :mod:`nsacomp.mct` -- monotone convergence moduli versus Feferman's mu
* :mod:`nsacomp.ecf` -- associates, partial application and pairing
"""

__version__ = "0.1.0"
