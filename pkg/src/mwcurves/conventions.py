"""Pinned sign and uniformizer conventions, with a fingerprint for reports."""

from __future__ import annotations

import hashlib

VERSION = "1"

TEXT = f"""mwcurves conventions v{VERSION}
generators: [a] -> ({{a}}, <a> - 1); eta -> (0, <1>) in degree -1; <a> = 1 + eta[a]
tame symbol: {{a,b}} -> (-1)^(v(a)v(b)) * b^v(a) / a^v(b), reduced at the place
residue: componentwise (tame symbol, second residue); d^pi([pi] m) = m for unramified m
uniformizer change: d^(u pi) = <u> d^pi
twist rebase: (m, u s) = (<u> m, s)
finite place g: default uniformizer g; canonical section g / g'
infinity: default uniformizer 1/t; canonical section -1/t
reciprocity: sum_x Tr_x d^(g/g')_x f + d^(-1/t)_inf f = 0
geometric transfer: beta -> -d^(-1/t)_inf f where d^(m/m')_x f = beta and f is unramified at other finite places
transfer of a finite extension: (norm, Scharlau trace form)
O(d) on P^1: sections e0 on A^1, e_inf near inf, e0 = t^d e_inf
"""

FINGERPRINT = hashlib.sha256(TEXT.encode()).hexdigest()[:16]
