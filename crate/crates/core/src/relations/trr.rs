use super::eliminate::Eliminator;
use super::monomial::Monomial;
use crate::error::{Error, Result};
use crate::strata::{BoundaryDivisor, TautClass};

/// Σ δ_0^I over I ⊂ [n] with i ∈ I and #I = n - 2, read literally on M̄_{0,n}.
pub fn printed_trr(n: u32, i: u32) -> Result<TautClass> {
    if n < 4 || i == 0 || i > n {
        return Err(Error::InvalidInput(format!("need n ≥ 4 and 1 ≤ i ≤ n, got n = {n}, i = {i}")));
    }
    let mut out = TautClass::zero(0, n);
    for mask in 0u32..1 << n {
        let legs: Vec<u32> = (1..=n).filter(|&l| mask & (1 << (l - 1)) != 0).collect();
        if legs.len() as u32 == n - 2 && legs.contains(&i) {
            out = out.add(&TautClass::divisor(0, n, &BoundaryDivisor::separating(0, &legs))?)?;
        }
    }
    Ok(out)
}

/// Comparison of the literal genus-zero divisor formula with the one derived
/// from the pullback formula and ψ_1 = 0 on M̄_{0,3}.
#[derive(Clone, Debug)]
pub struct TrrReport {
    pub markings: u32,
    pub leg: u32,
    pub printed: TautClass,
    pub derived: TautClass,
}

impl TrrReport {
    pub fn agrees(&self) -> bool {
        self.printed == self.derived
    }

    pub fn describe(&self) -> String {
        let verdict = if self.agrees() { "agree" } else { "DISAGREE" };
        format!(
            "psi{} on M(0,{}): literal sum\n{}\nderived\n{}\n{verdict}",
            self.leg,
            self.markings,
            self.printed.describe(),
            self.derived.describe()
        )
    }
}

pub fn trr_report(elim: &mut Eliminator, n: u32, i: u32) -> Result<TrrReport> {
    let printed = printed_trr(n, i)?;
    let mut psi = vec![0; n as usize];
    psi[i as usize - 1] = 1;
    let derived = elim.boundary_expression(0, &Monomial { psi, kappa: Vec::new() })?.value;
    Ok(TrrReport { markings: n, leg: i, printed, derived })
}
