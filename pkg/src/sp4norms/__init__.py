"""Exact arithmetic, Cartan invariants, and group C*-norm verification.

Subpackages build up from exact Laurent-polynomial arithmetic over F_q to
operator-norm checks for averaged group-algebra elements on unipotent
subgroups of Sp4 over the Laurent-series field, plus the Weyl-chamber decay
pipeline these norms feed.
"""

__version__ = "0.1.0"
