from hypothesis import strategies as st

from oracles import BINARY_BUILDERS, UNARY_BUILDERS
from ltlmine.formula import Atom


def formulas(props=("p", "q"), max_leaves=4):
    atoms = st.sampled_from(list(props)).map(Atom)

    def extend(children):
        unary = st.tuples(st.sampled_from(list(UNARY_BUILDERS)), children).map(
            lambda t: UNARY_BUILDERS[t[0]](t[1])
        )
        binary = st.tuples(st.sampled_from(list(BINARY_BUILDERS)), children, children).map(
            lambda t: BINARY_BUILDERS[t[0]](t[1], t[2])
        )
        return unary | binary

    return st.recursive(atoms, extend, max_leaves=max_leaves)


def traces(width=2, min_len=1, max_len=6):
    letter = st.tuples(*[st.booleans()] * width)
    return st.lists(letter, min_size=min_len, max_size=max_len).map(tuple)
