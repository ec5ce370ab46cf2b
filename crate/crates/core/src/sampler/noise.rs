use rand::Rng;

use crate::se3::{gaussian_vec, Igso3AngleSampler, Rotation};
use crate::{Result, Vec3};

/// Source of the per-residue noise consumed by the sampler.
///
/// Translation draws live in the lab frame; rotation draws are body-frame
/// tangent vectors. A rigid motion therefore acts on `trans` draws only,
/// which is what [`Rotated`] implements.
pub trait NoiseSource {
    fn trans(&mut self) -> Vec3;
    fn rot(&mut self) -> Vec3;
    fn igso3(&mut self, sampler: &Igso3AngleSampler) -> Result<Vec3>;
}

/// Standard normal draws from an RNG.
#[derive(Debug, Clone)]
pub struct Gaussian<R>(pub R);

impl<R: Rng> NoiseSource for Gaussian<R> {
    fn trans(&mut self) -> Vec3 {
        gaussian_vec(&mut self.0)
    }

    fn rot(&mut self) -> Vec3 {
        gaussian_vec(&mut self.0)
    }

    fn igso3(&mut self, sampler: &Igso3AngleSampler) -> Result<Vec3> {
        sampler.sample_tangent(&mut self.0)
    }
}

/// All draws zero; the sampler then follows its mean path.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl NoiseSource for Zero {
    fn trans(&mut self) -> Vec3 {
        Vec3::zeros()
    }

    fn rot(&mut self) -> Vec3 {
        Vec3::zeros()
    }

    fn igso3(&mut self, _: &Igso3AngleSampler) -> Result<Vec3> {
        Ok(Vec3::zeros())
    }
}

/// Rotates translation draws of `inner` by `q`.
#[derive(Debug, Clone)]
pub struct Rotated<N> {
    pub inner: N,
    pub q: Rotation,
}

impl<N: NoiseSource> NoiseSource for Rotated<N> {
    fn trans(&mut self) -> Vec3 {
        self.q.transform(&self.inner.trans())
    }

    fn rot(&mut self) -> Vec3 {
        self.inner.rot()
    }

    fn igso3(&mut self, sampler: &Igso3AngleSampler) -> Result<Vec3> {
        self.inner.igso3(sampler)
    }
}
