"""Canonical decimation models.

The two gasket families plus the hyperbolic-sine toy model whose Poincare
function has the closed form 4 sinh^2(sqrt(z)/2); that one serves as the
ground-truth oracle for everything downstream.

Multiplicity generating functions are stored with exact integer P, Q.
Derivations (all by summing the closed-form beta_m series):

  Neumann 2-gasket, lambda = 5:
    beta_m(-3) = (3^(m-1) + 3)/2 for m >= 1   ->  B = (2x - 5x^2)/(1 - 4x + 3x^2)
    beta_m(-5) = (3^(m-1) - 1)/2 for m >= 2   ->  B = x^2/(1 - 4x + 3x^2)

  Dirichlet K-gasket, lambda = K + 3:
    beta_m(-2)     = 1 at m = 1 only          ->  B = x
    beta_m(-(K+1)) = (K-1)/2 (K+1)^(m-1) - (K+1)/2  for m >= 2
        ->  B = ((K+1)(K-2)/2 x^2 + (K+1) x^3) / (1 - (K+2)x + (K+1)x^2)
    beta_m(-(K+3)) = (K-1)/2 (K+1)^(m-1) + (K+1)/2  for m >= 1
        ->  B = (K x - K(K+3)/2 x^2) / (1 - (K+2)x + (K+1)x^2)

  sinh toy, lambda = 4: single zero-fiber family, one eigenvalue per root
    (B = 1, m_min = 0).
"""

import os

from .poly import DecimationModel, DecimationPolynomial, OffsetSpec, RationalGF


def neumann_gasket():
    poly = DecimationPolynomial([5, 1])
    offsets = [
        OffsetSpec(-3, RationalGF([0, 2, -5], [1, -4, 3]), m_min=1),
        OffsetSpec(-5, RationalGF([0, 0, 1], [1, -4, 3]), m_min=2),
    ]
    return DecimationModel("sg2-neumann", poly, offsets)


def dirichlet_gasket(K=2):
    if K < 2:
        raise ValueError("gasket dimension K must be >= 2")
    lam = K + 3
    poly = DecimationPolynomial([lam, 1])
    q = [1, -(K + 2), K + 1]
    assert (K + 1) * (K - 2) % 2 == 0 and K * (K + 3) % 2 == 0
    offsets = [
        OffsetSpec(-2, RationalGF([0, 1], [1]), m_min=1),
        OffsetSpec(-(K + 1),
                   RationalGF([0, 0, (K + 1) * (K - 2) // 2, K + 1], q)),
        OffsetSpec(-lam,
                   RationalGF([0, K, -(K * (K + 3)) // 2], q), m_min=1),
    ]
    return DecimationModel("sg%d-dirichlet" % K, poly, offsets)


def sinh_model():
    poly = DecimationPolynomial([4, 1])
    offsets = [OffsetSpec(0, RationalGF([1], [1]), m_min=0)]
    return DecimationModel("sinh", poly, offsets)


BUILDERS = {
    "sg2-neumann": neumann_gasket,
    "sg2-dirichlet": lambda: dirichlet_gasket(2),
    "sg3-dirichlet": lambda: dirichlet_gasket(3),
    "sinh": sinh_model,
}


def model_names():
    return sorted(BUILDERS)


def get_model(name_or_path):
    """Registry name, packaged JSON name ('sg2-neumann.json'), or a file path."""
    base = name_or_path
    if base.endswith(".json"):
        base = base[:-5]
    if base in BUILDERS and not os.path.exists(name_or_path):
        return BUILDERS[base]()
    if os.path.exists(name_or_path):
        return DecimationModel.from_json(name_or_path)
    raise FileNotFoundError(
        "no model named %r and no such file; known models: %s"
        % (name_or_path, ", ".join(model_names())))


def packaged_model_path(name):
    here = os.path.dirname(__file__)
    return os.path.join(here, "models", name + ".json")


def write_model_files(directory):
    """Emit the canonical model JSONs; used to (re)generate package data."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name in model_names():
        path = os.path.join(directory, name + ".json")
        BUILDERS[name]().to_json(path)
        paths.append(path)
    return paths
