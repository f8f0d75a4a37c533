"""Injective linear transforms with pseudo-inverse synthesis and range projection.

Coefficient-space methods treat the transform range as a linear subspace:
``analyze`` maps a length-L signal to M >= L coefficients, ``synthesize``
applies the least-squares pseudo-inverse, and ``project_range`` is the
orthogonal projection onto the range (analysis of the synthesis).

Two backends are provided:

* :class:`DenseTransform` wraps an explicit complex matrix with full column
  rank. The pseudo-inverse is cached as a reduced QR factorization.
* :class:`GaborTransform` is a sampled short-time Fourier transform on a
  regular time-frequency lattice (hop ``a``, ``Mch`` frequency channels) with
  a periodized window of full signal length. Synthesis goes through the
  canonical dual window, obtained by inverting the frame operator on the
  analysis window with conjugate gradients.

Constructed transforms are immutable and safe to share between concurrent
solver runs.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .errors import BadLattice, BadShape, NotAFrame, RankDeficient

__all__ = [
    "LinearTransform",
    "DenseTransform",
    "GaborTransform",
    "make_dense",
    "make_gabor",
]

#: Dense matrices with smallest singular value below RANK_RTOL * largest are rejected.
RANK_RTOL = 1e-12

#: Gabor lattices whose lower frame bound falls below FRAME_RTOL * upper are rejected.
FRAME_RTOL = 1e-8

#: Relative residual target for the conjugate-gradient dual-window solve.
DUAL_CG_RTOL = 1e-12


class LinearTransform:
    """Common interface of the transform backends.

    Attributes
    ----------
    kind : str
        Backend identifier, ``"dense"`` or ``"gabor"``.
    L : int
        Signal length (domain dimension).
    M : int
        Coefficient count (codomain dimension), ``M >= L``.
    """

    kind = "abstract"

    def __init__(self, L, M):
        self.L = int(L)
        self.M = int(M)

    def analyze(self, x):
        """Apply the forward map to a length-L signal, returning M coefficients."""
        raise NotImplementedError

    def synthesize(self, c):
        """Apply the pseudo-inverse to M coefficients, returning a length-L signal."""
        raise NotImplementedError

    def project_range(self, c):
        """Orthogonal projection of coefficients onto the transform range."""
        return self.analyze(self.synthesize(c))

    def reflect_range(self, c):
        """Reflection across the range: ``2 * project_range(c) - c``. An involution."""
        c = self._check_coefs(c)
        return 2.0 * self.project_range(c) - c

    def _check_signal(self, x):
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.L,):
            raise BadShape(f"expected signal of length {self.L}, got shape {x.shape}")
        return x

    def _check_coefs(self, c):
        c = np.asarray(c, dtype=complex)
        if c.shape != (self.M,):
            raise BadShape(f"expected {self.M} coefficients, got shape {c.shape}")
        return c

    def __repr__(self):
        return f"{type(self).__name__}(L={self.L}, M={self.M})"


class DenseTransform(LinearTransform):
    """Transform backed by an explicit complex matrix of shape (M, L).

    Construction rejects matrices without full column rank (smallest singular
    value below ``RANK_RTOL`` times the largest). A reduced QR factorization
    is cached so that synthesis is a triangular solve and the range projection
    is ``Q (Q^H c)``.
    """

    kind = "dense"

    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2:
            raise BadShape(f"transform matrix must be 2-D, got shape {matrix.shape}")
        M, L = matrix.shape
        if M < L:
            raise BadShape(f"need at least as many coefficients as samples, got {M} x {L}")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("transform matrix contains non-finite entries")
        svals = np.linalg.svd(matrix, compute_uv=False)
        if svals[0] == 0.0 or svals[-1] < RANK_RTOL * svals[0]:
            raise RankDeficient(
                f"smallest singular value {svals[-1]:.3e} below {RANK_RTOL} * {svals[0]:.3e}"
            )
        super().__init__(L, M)
        self._matrix = matrix
        self._q, self._r = np.linalg.qr(matrix)
        for arr in (self._matrix, self._q, self._r):
            arr.setflags(write=False)
        self.sigma_min = float(svals[-1])
        self.sigma_max = float(svals[0])

    @property
    def matrix(self):
        return self._matrix

    def analyze(self, x):
        x = self._check_signal(x)
        return self._matrix @ x

    def synthesize(self, c):
        c = self._check_coefs(c)
        return solve_triangular(self._r, self._q.conj().T @ c, lower=False)

    def project_range(self, c):
        c = self._check_coefs(c)
        return self._q @ (self._q.conj().T @ c)


def _periodized_gaussian(L, width):
    """Periodized Gaussian ``sum_k exp(-pi (n + k L)^2 / width)``, unit l2 norm.

    ``width = a * Mch`` matches the window spread to the lattice.
    """
    n = np.arange(L, dtype=float)
    kmax = int(np.ceil(np.sqrt(80.0 * width / np.pi) / L)) + 1
    g = np.zeros(L)
    for k in range(-kmax, kmax + 1):
        g += np.exp(-np.pi * (n + k * L) ** 2 / width)
    return g / np.linalg.norm(g)


def _cg_hermitian(apply_op, b, rtol, max_iters):
    """Plain conjugate gradients for a Hermitian positive definite operator."""
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = np.vdot(r, r).real
    target = rtol * np.sqrt(np.vdot(b, b).real)
    for _ in range(max_iters):
        if np.sqrt(rs) <= target:
            break
        ap = apply_op(p)
        step = rs / np.vdot(p, ap).real
        x = x + step * p
        r = r - step * ap
        rs_new = np.vdot(r, r).real
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x


class GaborTransform(LinearTransform):
    """Sampled STFT on the lattice (hop ``a``, ``Mch`` channels), periodized window.

    Coefficients are laid out frame-major: entry ``n * Mch + m`` holds
    frequency channel ``m`` of time frame ``n`` (``n = 0 .. L/a - 1``).

    The lattice must satisfy ``a | L`` and ``Mch | L`` (the frequency shift
    has to be a whole number of DFT bins so that the frame operator commutes
    with the lattice, which is what makes dual-window synthesis equal the
    pseudo-inverse) and must not be undersampled (``Mch >= a``). The frame
    operator is block-diagonalized exactly at construction to verify the
    frame bounds before the dual window is computed.
    """

    kind = "gabor"

    def __init__(self, L, hop, channels, window="gauss"):
        L, hop, channels = int(L), int(hop), int(channels)
        if L < 1 or hop < 1 or channels < 1:
            raise BadLattice("signal length, hop and channel count must be positive")
        if L % hop != 0:
            raise BadLattice(f"hop {hop} does not divide signal length {L}")
        if L % channels != 0:
            raise BadLattice(f"channel count {channels} does not divide signal length {L}")
        if channels < hop:
            raise BadLattice(
                f"undersampled lattice: redundancy {channels}/{hop} < 1 cannot span the signal space"
            )
        frames = L // hop
        super().__init__(L, channels * frames)
        self.hop = hop
        self.channels = channels
        self.frames = frames
        self.window_kind = window

        if window == "gauss":
            g = _periodized_gaussian(L, hop * channels)
        elif window == "rect":
            g = np.zeros(L)
            g[:hop] = 1.0 / np.sqrt(hop)
        else:
            raise ValueError(f"unknown window kind {window!r} (use 'gauss' or 'rect')")
        self._window = g

        self.frame_bounds = self._frame_bounds()
        lower, upper = self.frame_bounds
        if lower <= FRAME_RTOL * upper:
            raise NotAFrame(
                f"lower frame bound {lower:.3e} below {FRAME_RTOL} * upper {upper:.3e} "
                f"for lattice (L={L}, a={hop}, Mch={channels}, {window})"
            )

        self._rolled = np.stack([np.roll(g, n * hop) for n in range(frames)])
        dual = _cg_hermitian(
            self._frame_operator, g.astype(complex), DUAL_CG_RTOL, max_iters=max(1000, 20 * L)
        )
        resid = np.linalg.norm(self._frame_operator(dual) - g) / np.linalg.norm(g)
        if resid > 10 * DUAL_CG_RTOL:
            raise NotAFrame(
                f"dual window solve stalled at relative residual {resid:.3e}; "
                "frame operator too ill-conditioned"
            )
        self._dual = np.real_if_close(dual, tol=1e6)
        self._rolled_dual = np.stack([np.roll(self._dual, n * hop) for n in range(frames)])
        for arr in (self._window, self._dual, self._rolled, self._rolled_dual):
            arr.setflags(write=False)

    @property
    def window(self):
        return self._window.copy()

    @property
    def dual_window(self):
        return self._dual.copy()

    @property
    def coef_shape(self):
        """2-D layout of the coefficient vector, ``(frames, channels)``."""
        return (self.frames, self.channels)

    def analyze(self, x):
        x = self._check_signal(x)
        prod = self._rolled.conj() * x[None, :]
        folded = prod.reshape(self.frames, self.L // self.channels, self.channels).sum(axis=1)
        return np.fft.fft(folded, axis=1).ravel()

    def synthesize(self, c):
        c = self._check_coefs(c)
        return self._adjoint(self._rolled_dual, c)

    def _adjoint(self, rolled_win, c):
        c2d = c.reshape(self.frames, self.channels)
        u = self.channels * np.fft.ifft(c2d, axis=1)
        return (rolled_win * np.tile(u, (1, self.L // self.channels))).sum(axis=0)

    def _frame_operator(self, x):
        # S x = T^H (T x) with the analysis window on both sides
        prod = self._rolled.conj() * x[None, :]
        folded = prod.reshape(self.frames, self.L // self.channels, self.channels).sum(axis=1)
        return self._adjoint(self._rolled, np.fft.fft(folded, axis=1).ravel())

    def _frame_bounds(self):
        """Exact frame bounds via the block structure of the frame operator.

        The frame operator only couples samples a multiple of ``Mch`` apart and
        its coupling weights are ``a``-periodic, so it splits into ``Mch``
        Hermitian blocks of size ``L/Mch`` whose eigenvalues are the frame
        operator spectrum.
        """
        L, a, Mch = self.L, self.hop, self.channels
        g = self._window
        qlen = L // Mch
        weights = np.empty((qlen, L))
        for j in range(qlen):
            phi = g * np.roll(g, j * Mch)
            weights[j] = np.tile(phi.reshape(L // a, a).sum(axis=0), L // a)
        lo, hi = np.inf, -np.inf
        p_idx = np.arange(qlen)
        shift = (p_idx[:, None] - p_idx[None, :]) % qlen
        for r in range(Mch):
            block = Mch * weights[shift, (r + p_idx[:, None] * Mch) % L]
            ev = np.linalg.eigvalsh(block)
            lo = min(lo, ev[0])
            hi = max(hi, ev[-1])
        return float(lo), float(hi)


def make_dense(entries):
    """Build a :class:`DenseTransform` from an (M, L) complex matrix."""
    return DenseTransform(entries)


def make_gabor(L, hop, channels, window="gauss"):
    """Build a :class:`GaborTransform` on the lattice (hop, channels) over length L."""
    return GaborTransform(L, hop, channels, window=window)
