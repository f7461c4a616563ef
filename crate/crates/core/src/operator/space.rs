use crate::error::{Error, Result};

/// Tensor-product Hilbert space with site 0 as the most significant factor.
///
/// A basis index reads as a mixed-radix numeral over the local dimensions,
/// so `|i_0 i_1 ... i_{n-1}>` has index `sum_k i_k * stride(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositeSpace {
    local_dims: Vec<usize>,
    total_dim: usize,
}

impl CompositeSpace {
    pub fn new(local_dims: Vec<usize>) -> Result<Self> {
        if local_dims.is_empty() {
            return Err(Error::InvalidSpace("no sites".into()));
        }
        if let Some(d) = local_dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSpace(format!("local dimension {d} < 2")));
        }
        let total_dim = local_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidSpace("total dimension overflows usize".into()))?;
        Ok(Self { local_dims, total_dim })
    }

    pub fn uniform(n_sites: usize, local_dim: usize) -> Result<Self> {
        Self::new(vec![local_dim; n_sites])
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::uniform(n, 2)
    }

    /// A single-factor space, used for particle-number sectors that are not
    /// tensor products.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn local_dim(&self, site: usize) -> usize {
        self.local_dims[site]
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Concatenated space `self ⊗ other`.
    pub fn concat(&self, other: &CompositeSpace) -> CompositeSpace {
        let mut dims = self.local_dims.clone();
        dims.extend_from_slice(&other.local_dims);
        CompositeSpace {
            local_dims: dims,
            total_dim: self.total_dim * other.total_dim,
        }
    }

    pub fn stride(&self, site: usize) -> usize {
        self.local_dims[site + 1..].iter().product()
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_sites()];
        for (k, &d) in self.local_dims.iter().enumerate().rev() {
            out[k] = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.local_dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites(),
            });
        }
        Ok(())
    }

    /// Validates a strictly ascending, in-range, nonempty site list.
    pub fn check_sites(&self, sites: &[usize]) -> Result<()> {
        if sites.is_empty() {
            return Err(Error::InvalidSites("empty site list".into()));
        }
        for &s in sites {
            self.check_site(s)?;
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSites(format!(
                "sites must be distinct and ascending, got {sites:?}"
            )));
        }
        Ok(())
    }

    /// The space spanned by the listed sites, in the listed order.
    pub fn subspace(&self, sites: &[usize]) -> Result<CompositeSpace> {
        self.check_sites(sites)?;
        CompositeSpace::new(sites.iter().map(|&s| self.local_dims[s]).collect())
    }

    pub fn complement(&self, sites: &[usize]) -> Vec<usize> {
        (0..self.n_sites()).filter(|s| !sites.contains(s)).collect()
    }

    /// Full-space index offsets of every configuration of `sites`, in the
    /// big-endian order of the sub-register. Empty `sites` yields `[0]`.
    pub(crate) fn offsets(&self, sites: &[usize]) -> Vec<usize> {
        let mut offsets = vec![0usize];
        for &s in sites {
            let stride = self.stride(s);
            let d = self.local_dims[s];
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..d).map(move |i| o + i * stride))
                .collect();
        }
        offsets
    }
}
