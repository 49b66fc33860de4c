use crate::error::{Error, Result};

/// Dealiasing rule used for quadratic products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dealias {
    /// Product on the native grid, then truncation to `|k_i| <= (n-1)/3`.
    #[default]
    TwoThirds,
    /// Product on a zero-padded `3n/2` grid, truncated back to the native lattice.
    ThreeHalves,
}

/// Lattice resolution and dealiasing rule for the box `[0, 2π)³`.
///
/// Mode `(i, j, l)` is stored at flat index `i + n (j + n l)` (x fastest); the
/// index `i` carries wavenumber `i` for `i <= n/2` and `i - n` otherwise, so
/// each axis spans `[-n/2 + 1, n/2]`. The `n/2` (Nyquist) slot has no
/// conjugate partner and is kept at zero by every field constructor.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    n: usize,
    dealias: Dealias,
}

impl PartialEq for GridSpec {
    // The dealias tag selects a product rule; it does not change the lattice.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n must be even and >= 8, got {n}")));
        }
        Ok(Self { n, dealias: Dealias::default() })
    }

    pub fn with_dealias(mut self, dealias: Dealias) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Size of the three-halves padded grid.
    pub fn padded_n(&self) -> usize {
        3 * self.n / 2
    }

    /// Largest wavenumber kept by the two-thirds rule.
    pub fn two_thirds_cutoff(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }

    /// Grid spacing `2π/n`.
    pub fn dx(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n as f64
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        i + self.n * (j + self.n * l)
    }

    /// Integer wavevector stored at flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [wavenumber(idx % n, n), wavenumber((idx / n) % n, n), wavenumber(idx / (n * n), n)]
    }

    /// Flat index of a wavevector; components are taken modulo `n`.
    #[inline]
    pub fn index_of(&self, k: [i64; 3]) -> usize {
        let n = self.n as i64;
        let w = |c: i64| c.rem_euclid(n) as usize;
        self.index(w(k[0]), w(k[1]), w(k[2]))
    }

    /// Flat index of `-k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let neg = |c: usize| (n - c) % n;
        self.index(neg(idx % n), neg((idx / n) % n), neg(idx / (n * n)))
    }

    /// True when some component sits on the unpaired `n/2` slot.
    #[inline]
    pub fn is_nyquist(&self, k: [i64; 3]) -> bool {
        let h = self.n as i64 / 2;
        k.iter().any(|&c| c == h)
    }

    #[inline]
    pub fn in_two_thirds(&self, k: [i64; 3]) -> bool {
        let c = self.two_thirds_cutoff();
        k.iter().all(|&x| x.abs() <= c)
    }
}

#[inline]
pub(crate) fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[inline]
pub(crate) fn k_sq(k: [i64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

#[inline]
pub(crate) fn kf(k: [i64; 3]) -> [f64; 3] {
    [k[0] as f64, k[1] as f64, k[2] as f64]
}
