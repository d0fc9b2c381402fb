"""Shape functions of the 8-node shell element.

Node order: corners (-1,-1), (1,-1), (1,1), (-1,1), then mid-sides
(0,-1), (1,0), (0,1), (-1,0).  The mid-surface displacement uses the
8-node serendipity family; director displacement, micro-rotation and
thickness stretch use the bilinear family on the corners.
"""

import numpy as np

NODE_XI = np.array(
    [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]
)

_G = 1.0 / np.sqrt(3.0)
#: 2x2 Gauss-Legendre points (all weights 1).
GAUSS_2X2 = np.array([[-_G, -_G], [_G, -_G], [_G, _G], [-_G, _G]])
#: Parent-thickness points of the 2-point rule, in units of h/2.
GAUSS_THICKNESS = np.array([-_G, _G])


def bilinear(xi, eta):
    """Values (4,) and parent derivatives (4, 2) of the bilinear functions."""
    xs, es = NODE_XI[:4, 0], NODE_XI[:4, 1]
    n = 0.25 * (1 + xs * xi) * (1 + es * eta)
    dn = np.stack([0.25 * xs * (1 + es * eta), 0.25 * es * (1 + xs * xi)], axis=-1)
    return n, dn


def serendipity(xi, eta):
    """Values (8,) and parent derivatives (8, 2) of the serendipity functions."""
    n = np.empty(8)
    dn = np.empty((8, 2))
    for a in range(4):
        xa, ea = NODE_XI[a]
        n[a] = 0.25 * (1 + xa * xi) * (1 + ea * eta) * (xa * xi + ea * eta - 1)
        dn[a, 0] = 0.25 * xa * (1 + ea * eta) * (2 * xa * xi + ea * eta)
        dn[a, 1] = 0.25 * ea * (1 + xa * xi) * (xa * xi + 2 * ea * eta)
    for a in (4, 6):
        ea = NODE_XI[a, 1]
        n[a] = 0.5 * (1 - xi * xi) * (1 + ea * eta)
        dn[a, 0] = -xi * (1 + ea * eta)
        dn[a, 1] = 0.5 * ea * (1 - xi * xi)
    for a in (5, 7):
        xa = NODE_XI[a, 0]
        n[a] = 0.5 * (1 + xa * xi) * (1 - eta * eta)
        dn[a, 0] = 0.5 * xa * (1 - eta * eta)
        dn[a, 1] = -eta * (1 + xa * xi)
    return n, dn


def shape_functions(xi, eta):
    """``(N_u, dN_u, N_c, dN_c)`` for the serendipity and corner families."""
    nu, dnu = serendipity(xi, eta)
    nc, dnc = bilinear(xi, eta)
    return nu, dnu, nc, dnc
