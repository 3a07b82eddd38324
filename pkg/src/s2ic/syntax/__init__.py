from .ast import *  # noqa: F401,F403
from .ast import _Rel  # noqa: F401
from .parser import parse, parse_contact, parse_fo, parse_modal, parse_rule, parse_term
from .printer import pretty, pretty_rule
from .transform import (encode_fo, expand_nleq, flatten_modal, minterm, minterm_atoms,
                        normalize_atoms, projective_unifier, tau1, tau2_branches)
