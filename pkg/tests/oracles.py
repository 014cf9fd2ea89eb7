"""Independent oracles: direct quadrature of the defining integrals and
brute-force linear algebra.  Nothing here shares code paths with the package
implementations it checks."""

import math

import numpy as np
from scipy.integrate import quad
from scipy.special import erf


def fz_modulated_period(t, k, b, c, d):
    """Time-domain ansatz over one period tau = 1: pulse 1 on [0, 1/2] starting
    at a pulse boundary, pulse 2 its sign-flipped copy."""
    t = np.asarray(t, dtype=float)
    t_pi = 0.5
    tm, tl, tr = 0.25, 0.25 - b * t_pi, 0.25 + b * t_pi

    def one_pulse(tt):
        beta = (d / (math.pi * k * b)) * math.sin(math.pi * k / 2) * (
            erf((tt - tl) / (c * t_pi)) - erf((tt - tr) / (c * t_pi))
        )
        return np.cos(np.pi * tt / t_pi) + beta * np.sin(k * 2 * np.pi * (tt - tm))

    return np.where(t < 0.5, one_pulse(t), -one_pulse(t - 0.5))


def fz_tophat_period(t, t_pi_frac):
    """Top-hat family over one period tau = 1: pulses of width t_pi_frac
    centred in each half period; sinusoidal flanks during the pulse."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    half = np.mod(t, 0.5)
    sign = np.where(np.mod(t, 1.0) < 0.5, 1.0, -1.0)
    centre = 0.25
    inside = np.abs(half - centre) <= t_pi_frac / 2
    phase = np.pi * (half - (centre - t_pi_frac / 2)) / t_pi_frac
    out = np.where(inside, np.cos(phase), np.where(half < centre, 1.0, -1.0))
    return sign * out


def fourier_coefficient_quad(fz_period, n, points=(0.25, 0.5, 0.75)):
    """f_n = 2 int_0^1 f_z(t) cos(2 pi n t) dt by adaptive quadrature."""
    val, _ = quad(
        lambda t: float(fz_period(np.array([t]))[0]) * math.cos(2 * math.pi * n * t),
        0.0,
        1.0,
        limit=800,
        epsabs=1e-14,
        epsrel=1e-13,
        points=list(points),
    )
    return 2.0 * val


def fourier_coefficients_gl(fz_period, n_max, panels=64, order=32, breakpoints=()):
    """All f_n up to n_max by composite Gauss-Legendre (fast, vectorised).

    Panels are refined between the supplied breakpoints so kinks in f_z
    (pulse edges) never sit inside a panel; the rule is then spectrally
    accurate on each smooth piece.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    anchors = np.unique(np.concatenate([[0.0, 1.0], np.asarray(breakpoints, float)]))
    edges = np.unique(
        np.concatenate(
            [np.linspace(lo, hi, max(2, int(panels * (hi - lo)) + 1))
             for lo, hi in zip(anchors, anchors[1:])]
        )
    )
    t = np.concatenate(
        [0.5 * (hi - lo) * nodes + 0.5 * (hi + lo) for lo, hi in zip(edges, edges[1:])]
    )
    w = np.concatenate([0.5 * (hi - lo) * weights for lo, hi in zip(edges, edges[1:])])
    fz = fz_period(t)
    ns = np.arange(1, n_max + 1)
    basis = np.cos(2 * np.pi * ns[:, None] * t[None, :])
    return 2.0 * (basis * fz[None, :]) @ w


def displaced_thermal_bell_fidelity(alpha, theta, nbar, n_fock=80, initial="xx"):
    """Brute-force fidelity of U = D(alpha S_z) exp(i theta S_z^2) on a truncated
    Fock space; independent of the closed-form expression under test."""
    a = np.diag(np.sqrt(np.arange(1, n_fock)), 1)
    ad = a.T.conj()

    def displacement(amp):
        from scipy.linalg import expm

        return expm(amp * ad - np.conj(amp) * a)

    if nbar == 0.0:
        pops = np.zeros(n_fock)
        pops[0] = 1.0
    else:
        q = nbar / (1.0 + nbar)
        pops = (1 - q) * q ** np.arange(n_fock)
        pops /= pops.sum()
    rho_th = np.diag(pops).astype(complex)

    plus_x = np.array([1, 1], dtype=complex) / np.sqrt(2)
    plus_y = np.array([1, 1j], dtype=complex) / np.sqrt(2)
    minus_x = np.array([1, -1], dtype=complex) / np.sqrt(2)
    minus_y = np.array([1, -1j], dtype=complex) / np.sqrt(2)
    if initial == "xx":
        psi0 = np.kron(plus_x, plus_x)
        target = (np.kron(plus_x, plus_x) + 1j * np.kron(minus_x, minus_x)) / np.sqrt(2)
    else:
        psi0 = np.kron(plus_x, plus_y)
        target = (np.kron(plus_x, plus_y) + 1j * np.kron(minus_x, minus_y)) / np.sqrt(2)

    m_vals = np.array([2.0, 0.0, 0.0, -2.0])
    d_ops = {m: displacement(alpha * m) for m in set(m_vals)}
    sigma = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            mode = d_ops[m_vals[i]] @ rho_th @ d_ops[m_vals[j]].conj().T
            sigma[i, j] = (
                psi0[i]
                * np.conj(psi0[j])
                * np.exp(1j * theta * (m_vals[i] ** 2 - m_vals[j] ** 2))
                * np.trace(mode)
            )
    overlap = abs(target.conj() @ sigma @ target)
    purity = abs(np.trace(sigma @ sigma.conj().T))
    return float(overlap / math.sqrt(purity))
