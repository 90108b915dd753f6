"""Shared fixtures: the worked examples used throughout the suite."""

import pytest

from mobosat.model import Instance, LinearExpr, Literal, PBConstraint


def lit(v):
    return Literal(v)


def nlit(v):
    return Literal(v, True)


@pytest.fixture
def two_obj_triangle():
    """f = (2x1 + x2 + ~x3, ~x1 + x2 + 2x3) subject to x1 + x2 + x3 >= 2.

    Four feasible assignments; front {(1,4), (2,2), (4,1)}.
    """
    return Instance(
        num_vars=3,
        constraints=(PBConstraint(LinearExpr(((1, lit(1)), (1, lit(2)), (1, lit(3)))), 2),),
        objectives=(
            LinearExpr(((2, lit(1)), (1, lit(2)), (1, nlit(3)))),
            LinearExpr(((1, nlit(1)), (1, lit(2)), (2, lit(3)))),
        ),
    )


@pytest.fixture
def ladder_example():
    """min 3x1 + 2x2 + 2x3 subject to {x1 + x2 >= 1, ~x2 + x3 >= 1}; optimum 3."""
    return Instance(
        num_vars=3,
        constraints=(
            PBConstraint(LinearExpr(((1, lit(1)), (1, lit(2)))), 1),
            PBConstraint(LinearExpr(((1, nlit(2)), (1, lit(3)))), 1),
        ),
        objectives=(LinearExpr(((3, lit(1)), (2, lit(2)), (2, lit(3)))),),
    )


@pytest.fixture
def unconstrained_biobjective():
    """f1 = 3x1 + 3x2 + x3 + 2x4 + 1, f2 = 4~x1 + 5~x2 + 5~x3 + 7~x4 + 1.

    Front {(1,22), (2,17), (3,15), (4,10), (7,5), (10,1)}.
    """
    return Instance(
        num_vars=4,
        constraints=(),
        objectives=(
            LinearExpr(((3, lit(1)), (3, lit(2)), (1, lit(3)), (2, lit(4))), 1),
            LinearExpr(((4, nlit(1)), (5, nlit(2)), (5, nlit(3)), (7, nlit(4))), 1),
        ),
    )


@pytest.fixture
def infeasible_instance():
    return Instance(
        num_vars=2,
        constraints=(
            PBConstraint(LinearExpr(((1, lit(1)),)), 1),
            PBConstraint(LinearExpr(((1, nlit(1)),)), 1),
        ),
        objectives=(LinearExpr(((1, lit(2)),)),),
    )
