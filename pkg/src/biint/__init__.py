"""Bi-intuitionistic logic workbench: syntax, Hilbert proofs, Kripke
models, finite bi-Heyting algebras and the separation results between
the weak and strong consequence relations."""

__version__ = "0.1.0"
