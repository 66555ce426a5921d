use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::{factorial, finite_difference_extract, stencil_points, Rational};
use crate::error::{Error, Result};
use crate::pixton::OmegaEngine;
use crate::strata::{Stratum, TautClass};

/// Multiplies by Ψ_C and forgets legs; shared by the engine and its filter.
#[derive(Clone, Debug)]
struct Transport {
    g: u32,
    legs: u32,
    multiplier: Vec<u32>,
    forget: Vec<u32>,
}

impl Transport {
    fn apply(&self, c: &TautClass) -> Result<TautClass> {
        let mut x = c.clone();
        for (i, &e) in self.multiplier.iter().enumerate() {
            for _ in 0..e {
                x = x.mul_psi(i as u32 + 1)?;
            }
        }
        if self.forget.is_empty() {
            Ok(x)
        } else {
            x.forget_legs(&self.forget)
        }
    }

    fn survives(&self, s: &Stratum) -> bool {
        self.apply(&TautClass::single(s.clone(), Rational::one())).map(|c| !c.is_zero()).unwrap_or(true)
    }
}

/// The DR relations 2^{g+1}(g+1)!·Π_*(Ψ_C·[Ω_{g,A}]_{g+1}) on the target
/// space, as functions of (a_1, …, a_{N-1}) with a_N = -(a_1 + … + a_{N-1}).
pub struct DrEngine {
    transport: Transport,
    omega: OmegaEngine,
    samples: Option<usize>,
    cache: Mutex<HashMap<Vec<i64>, TautClass>>,
}

impl DrEngine {
    /// Relations on M̄_{g,N} (N = `multiplier.len()`) multiplied by Ψ_C and
    /// pushed forward along the map forgetting `forget`.
    pub fn new(g: u32, multiplier: &[u32], forget: &[u32]) -> Result<Self> {
        let legs = multiplier.len() as u32;
        if legs < 2 {
            return Err(Error::InvalidInput("at least two markings are required".into()));
        }
        let mut sorted = forget.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != forget.len() || sorted.iter().any(|&l| l == 0 || l > legs) {
            return Err(Error::InvalidInput(format!("bad set of legs to forget: {forget:?}")));
        }
        let target = legs - forget.len() as u32;
        if 2 * g as i64 - 2 + target as i64 <= 0 {
            return Err(Error::InvalidInput(format!("target M({g},{target}) is not stable")));
        }
        let transport = Transport { g, legs, multiplier: multiplier.to_vec(), forget: sorted };
        let mut omega = OmegaEngine::with_degrees(g, legs, g + 1, g + 1)?;
        if !transport.forget.is_empty() || transport.multiplier.iter().any(|&c| c > 0) {
            omega.prune(|s| transport.survives(s));
        }
        log::info!("DR engine on M({g},{legs}): {} graphs after pruning", omega.num_graphs());
        Ok(DrEngine { transport, omega, samples: None, cache: Mutex::new(HashMap::new()) })
    }

    /// Fixes the number of r-samples per interpolation (default: from the
    /// degree bound).
    pub fn with_samples(mut self, samples: Option<usize>) -> Self {
        self.samples = samples;
        self
    }

    pub fn genus(&self) -> u32 {
        self.transport.g
    }

    /// Number of markings of the ambient space.
    pub fn legs(&self) -> u32 {
        self.transport.legs
    }

    pub fn multiplier(&self) -> &[u32] {
        &self.transport.multiplier
    }

    pub fn target_markings(&self) -> u32 {
        self.transport.legs - self.transport.forget.len() as u32
    }

    /// Multiplies a class on the ambient space by Ψ_C and pushes it forward.
    pub fn transport(&self, c: &TautClass) -> Result<TautClass> {
        self.transport.apply(c)
    }

    fn scale(&self) -> Rational {
        let g = self.transport.g;
        Rational::from_integer(BigInt::from(2u32).pow(g + 1) * factorial(g + 1))
    }

    /// The relation at the integer point (a_1, …, a_{N-1}).
    pub fn relation_at(&self, a: &[i64]) -> Result<TautClass> {
        if a.len() + 1 != self.transport.legs as usize {
            return Err(Error::InvalidInput(format!("expected {} free ramification entries", self.transport.legs - 1)));
        }
        if let Some(c) = self.cache.lock().expect("cache lock").get(a) {
            return Ok(c.clone());
        }
        let mut full = a.to_vec();
        full.push(-a.iter().sum::<i64>());
        let t = std::time::Instant::now();
        let omega = self.omega.constant_term_with(&full, self.samples)?;
        let t1 = t.elapsed();
        let rel = self.transport(&omega.scale(&self.scale()))?;
        log::debug!("Ω at {full:?}: {} terms in {t1:?}, transported in {:?}", omega.len(), t.elapsed() - t1);
        self.cache.lock().expect("cache lock").insert(a.to_vec(), rel.clone());
        Ok(rel)
    }

    /// Coefficient of a^m (exponents for a_1..a_{N-1}, total degree 2g+2)
    /// in the relation, by finite differences over integer points.
    pub fn coefficient(&self, m: &[u32]) -> Result<TautClass> {
        let g = self.transport.g;
        if m.len() + 1 != self.transport.legs as usize {
            return Err(Error::InvalidInput(format!("a-monomial needs {} exponents", self.transport.legs - 1)));
        }
        let degree: u32 = m.iter().sum();
        if degree != 2 * g + 2 {
            return Err(Error::InvalidInput(format!("a-monomial has degree {degree}, expected {}", 2 * g + 2)));
        }
        let points = stencil_points(m, 2 * g + 2);
        for (i, (p, _)) in points.iter().enumerate() {
            log::debug!("DR stencil point {}/{}: {p:?}", i + 1, points.len());
            self.relation_at(p)?;
        }
        let extracted: TautClass = finite_difference_extract(
            |p: &[i64]| self.relation_at(p).expect("stencil point was evaluated"),
            m,
            2 * g + 2,
        );
        let mfact: BigInt = m.iter().map(|&e| factorial(e)).product();
        Ok(extracted.scale(&(Rational::one() / Rational::from_integer(mfact))))
    }

    pub fn num_graphs(&self) -> usize {
        self.omega.num_graphs()
    }

    /// Number of cached integer points.
    pub fn cached_points(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

/// (g+1)! times the coefficient of a^m in Π_*(Ψ_C·[Ω_{g,A}]_{g+1}), where Π
/// forgets `forget` and a_N is eliminated. A relation on the target space.
pub fn dr_relation_coefficient(g: u32, m: &[u32], multiplier: &[u32], forget: &[u32]) -> Result<TautClass> {
    let engine = DrEngine::new(g, multiplier, forget)?;
    let c = engine.coefficient(m)?;
    Ok(c.scale(&(Rational::one() / Rational::from_integer(BigInt::from(2u32).pow(g + 1)))))
}
