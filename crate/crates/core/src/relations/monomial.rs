use std::fmt;

use crate::error::{Error, Result};
use crate::strata::{Stratum, TautClass};

/// A monomial ψ_1^{d_1}⋯ψ_n^{d_n}·κ_{b_1}⋯κ_{b_l} on M̄_{g,n}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    /// ψ exponent of each leg.
    pub psi: Vec<u32>,
    /// κ indices, sorted, with repetition.
    pub kappa: Vec<u32>,
}

impl Monomial {
    pub fn new(psi: Vec<u32>, mut kappa: Vec<u32>) -> Result<Self> {
        if kappa.contains(&0) {
            return Err(Error::InvalidInput("κ indices start at 1".into()));
        }
        kappa.sort_unstable();
        Ok(Monomial { psi, kappa })
    }

    pub fn one(n: u32) -> Self {
        Monomial { psi: vec![0; n as usize], kappa: Vec::new() }
    }

    pub fn markings(&self) -> u32 {
        self.psi.len() as u32
    }

    pub fn degree(&self) -> u32 {
        self.psi.iter().sum::<u32>() + self.kappa.iter().sum::<u32>()
    }

    /// Parses e.g. `psi1^2*kappa1` for a space with `n` legs; `1` is the unit.
    pub fn parse(text: &str, n: u32) -> Result<Self> {
        let mut psi = vec![0u32; n as usize];
        let mut kappa = Vec::new();
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(Monomial { psi, kappa });
        }
        for factor in text.split('*') {
            let factor = factor.trim();
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
                None => (factor, 1),
            };
            let index = |prefix: &str| -> Result<u32> {
                base[prefix.len()..].parse::<u32>().map_err(|_| Error::Parse(format!("bad index in {factor:?}")))
            };
            if base.starts_with("psi") {
                let i = index("psi")?;
                if i == 0 || i > n {
                    return Err(Error::Parse(format!("no leg {i} among {n} markings")));
                }
                psi[i as usize - 1] += exp;
            } else if base.starts_with("kappa") {
                let a = index("kappa")?;
                if a == 0 {
                    return Err(Error::Parse("κ indices start at 1".into()));
                }
                kappa.extend(std::iter::repeat(a).take(exp as usize));
            } else {
                return Err(Error::Parse(format!("unknown factor {factor:?}")));
            }
        }
        kappa.sort_unstable();
        Ok(Monomial { psi, kappa })
    }

    pub fn stratum(&self, g: u32) -> Result<Stratum> {
        Stratum::monomial(g, &self.psi, &self.kappa)
    }

    pub fn class(&self, g: u32) -> Result<TautClass> {
        TautClass::monomial(g, &self.psi, &self.kappa)
    }

    /// Reads the monomial off a single-vertex stratum.
    pub fn from_stratum(s: &Stratum) -> Option<Self> {
        if s.num_vertices() != 1 {
            return None;
        }
        Some(Monomial { psi: (1..=s.num_legs()).map(|l| s.leg_psi(l)).collect(), kappa: s.kappa(0).to_vec() })
    }

    /// Relabels legs by `perm[old - 1] = new`.
    pub fn relabel(&self, perm: &[u32]) -> Self {
        let mut psi = vec![0; self.psi.len()];
        for (i, &d) in self.psi.iter().enumerate() {
            psi[perm[i] as usize - 1] = d;
        }
        Monomial { psi, kappa: self.kappa.clone() }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &d) in self.psi.iter().enumerate() {
            match d {
                0 => {}
                1 => parts.push(format!("psi{}", i + 1)),
                _ => parts.push(format!("psi{}^{d}", i + 1)),
            }
        }
        let mut k = 0;
        while k < self.kappa.len() {
            let a = self.kappa[k];
            let run = self.kappa[k..].iter().take_while(|&&b| b == a).count();
            parts.push(if run == 1 { format!("kappa{a}") } else { format!("kappa{a}^{run}") });
            k += run;
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}
