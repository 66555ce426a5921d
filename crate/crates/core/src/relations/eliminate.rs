use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::db::RelationDb;
use super::dr::DrEngine;
use super::monomial::Monomial;
use crate::algebra::{factorial, Rational};
use crate::error::{Error, Result};
use crate::strata::{Stratum, TautClass};

/// One relation used in a derivation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProvenanceStep {
    pub relation: String,
    pub a_monomial: String,
    pub manipulation: String,
}

/// A class supported on the boundary together with the relations used to
/// derive it.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryExpression {
    pub value: TautClass,
    pub provenance: Vec<ProvenanceStep>,
}

impl BoundaryExpression {
    fn new(value: TautClass, mut provenance: Vec<ProvenanceStep>) -> Result<Self> {
        if let Some((s, _)) = value.terms().find(|(s, _)| s.num_edges() == 0) {
            return Err(Error::Defect(format!("boundary expression contains the open stratum {}", s.describe())));
        }
        provenance.sort();
        provenance.dedup();
        if !value.is_zero() && provenance.is_empty() {
            return Err(Error::Defect("non-zero boundary expression without provenance".into()));
        }
        Ok(BoundaryExpression { value, provenance })
    }

    fn zero(g: u32, n: u32, why: &str) -> Self {
        BoundaryExpression {
            value: TautClass::zero(g, n),
            provenance: vec![ProvenanceStep { relation: why.into(), a_monomial: String::new(), manipulation: "zero".into() }],
        }
    }
}

/// A boundary expression for a monomial of M̄_{g,n}.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationRecord {
    pub genus: u32,
    pub monomial: Monomial,
    pub expression: BoundaryExpression,
}

/// One coefficient extraction: Σ c_K T(K) + boundary = 0.
#[derive(Clone, Debug)]
struct Generating {
    engine: EngineKey,
    open: Vec<(Vec<u32>, Rational)>,
    boundary: TautClass,
}

type EngineKey = (u32, Vec<u32>, u32);

/// Compositions of `total` into `parts` non-negative parts, lexicographic.
pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

fn psi_text(e: &[u32]) -> String {
    Monomial { psi: e.to_vec(), kappa: Vec::new() }.to_string()
}

fn a_text(m: &[u32]) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("a{}", i + 1) } else { format!("a{}^{e}", i + 1) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Coefficient of a^m (a_N eliminated) in (Σ_{i<N} a_i²ψ_i + (Σ a_i)²ψ_N)^{g+1}
/// at the ψ-monomial `k`.
fn open_coefficient(g: u32, m: &[u32], k: &[u32]) -> Rational {
    let n = k.len();
    let mut den = BigInt::one();
    for i in 0..n - 1 {
        if m[i] < 2 * k[i] {
            return Rational::zero();
        }
        den *= factorial(m[i] - 2 * k[i]) * factorial(k[i]);
    }
    den *= factorial(k[n - 1]);
    big(factorial(g + 1) * factorial(2 * k[n - 1])) / big(den)
}

/// Derives boundary expressions from Pixton's relations, caching DR
/// engines, intermediate eliminations and finished records.
pub struct Eliminator {
    samples: Option<usize>,
    engines: HashMap<EngineKey, DrEngine>,
    solved: HashMap<(EngineKey, Vec<u32>), BoundaryExpression>,
    generating: Vec<Generating>,
    memo: HashMap<(u32, Monomial), BoundaryExpression>,
    db: Option<RelationDb>,
}

impl Default for Eliminator {
    fn default() -> Self {
        Self::new()
    }
}

impl Eliminator {
    pub fn new() -> Self {
        Eliminator {
            samples: None,
            engines: HashMap::new(),
            solved: HashMap::new(),
            generating: Vec::new(),
            memo: HashMap::new(),
            db: None,
        }
    }

    pub fn with_db(mut self, db: RelationDb) -> Self {
        self.db = Some(db);
        self
    }

    pub fn with_samples(mut self, samples: Option<usize>) -> Self {
        self.samples = samples;
        self
    }

    pub fn db(&self) -> Option<&RelationDb> {
        self.db.as_ref()
    }

    fn engine(&mut self, key: &EngineKey) -> Result<&DrEngine> {
        if !self.engines.contains_key(key) {
            let (g, c, n) = key;
            let forget: Vec<u32> = (n + 1..=c.len() as u32).collect();
            log::info!("building DR engine g={g} Ψ_C={} forgetting {forget:?}", psi_text(c));
            let e = DrEngine::new(*g, c, &forget)?.with_samples(self.samples);
            self.engines.insert(key.clone(), e);
        }
        Ok(&self.engines[key])
    }

    /// Π_{n*}(ψ^K Ψ_C) on M̄_{g,n}.
    fn t_class(&mut self, key: &EngineKey, k: &[u32]) -> Result<TautClass> {
        let (g, c, n) = key;
        let d: Vec<u32> = k.iter().zip(c).map(|(a, b)| a + b).collect();
        let x = TautClass::monomial(*g, &d, &[])?;
        x.pushforward_many(c.len() as u32 - n)
    }

    /// Boundary expression for Π_{n*}(ψ^K Ψ_C), by descending induction on
    /// the exponent of the last ψ.
    fn solve_t(&mut self, key: &EngineKey, k: &[u32]) -> Result<BoundaryExpression> {
        if let Some(e) = self.solved.get(&(key.clone(), k.to_vec())) {
            return Ok(e.clone());
        }
        let (g, c, n) = key.clone();
        let big_n = c.len();
        let target = self.t_class(key, k)?;
        if target.is_zero() {
            let e = BoundaryExpression::zero(g, n, "vanishes in the strata algebra");
            self.solved.insert((key.clone(), k.to_vec()), e.clone());
            return Ok(e);
        }
        let last = k[big_n - 1];
        let zeros: Vec<usize> = (0..big_n - 1).filter(|&i| k[i] == 0).collect();
        if zeros.len() < 2 * last as usize {
            return Err(Error::Elimination(format!("too few vanishing exponents in {}", psi_text(k))));
        }
        let j = (last > 0).then(|| zeros[2 * last as usize - 1]);
        let m: Vec<u32> = (0..big_n - 1)
            .map(|i| match (k[i], j) {
                (ki, _) if ki > 0 => 2 * ki,
                (_, Some(j)) if i <= j => 1,
                _ => 0,
            })
            .collect();
        if (n as usize) < big_n && m[..n as usize].iter().any(|&x| x == 0) {
            return Err(Error::Elimination(format!(
                "a-monomial {} for {} is not a multiple of a1…a{n}",
                a_text(&m),
                psi_text(k)
            )));
        }
        let relation = self.engine(key)?.coefficient(&m)?;
        let mut open = Vec::new();
        let mut open_class = TautClass::zero(g, n);
        for kp in compositions(g + 1, big_n) {
            let coeff = open_coefficient(g, &m, &kp);
            if coeff.is_zero() {
                continue;
            }
            if kp != k && kp[big_n - 1] <= last {
                return Err(Error::Elimination(format!(
                    "a-monomial {} also involves {}, not resolved by induction",
                    a_text(&m),
                    psi_text(&kp)
                )));
            }
            open_class.add_scaled(&self.t_class(key, &kp)?, &coeff)?;
            open.push((kp, coeff));
        }
        let boundary = relation.sub(&open_class)?;
        if let Some((s, _)) = boundary.terms().find(|(s, _)| s.num_edges() == 0) {
            return Err(Error::Defect(format!(
                "boundary part of the relation for {} has the open term {}",
                a_text(&m),
                s.describe()
            )));
        }
        let own = open.iter().find(|(kp, _)| kp == k).map(|(_, c)| c.clone());
        let Some(ck) = own else {
            return Err(Error::Elimination(format!("{} does not occur at {}", psi_text(k), a_text(&m))));
        };
        let mut acc = boundary.clone();
        let mut provenance = vec![ProvenanceStep {
            relation: format!("DR g={g} multiplier {} forgetting {}..{big_n}", psi_text(&c), n + 1),
            a_monomial: a_text(&m),
            manipulation: format!("solve for {} with coefficient {ck}", psi_text(k)),
        }];
        for (kp, coeff) in &open {
            if kp == k {
                continue;
            }
            let sub = self.solve_t(key, kp)?;
            acc.add_scaled(&sub.value, coeff)?;
            provenance.extend(sub.provenance);
        }
        let value = acc.scale(&(-Rational::one() / ck));
        self.generating.push(Generating { engine: key.clone(), open, boundary });
        let e = BoundaryExpression::new(value, provenance)?;
        self.solved.insert((key.clone(), k.to_vec()), e.clone());
        Ok(e)
    }

    /// Boundary expressions for every degree-(g+1) ψ-monomial on M̄_{g,2g+3}.
    pub fn psi_boundary_lemma(&mut self, g: u32) -> Result<Vec<RelationRecord>> {
        let big_n = 2 * g as usize + 3;
        let key: EngineKey = (g, vec![0; big_n], big_n as u32);
        let mut out = Vec::new();
        for k in compositions(g + 1, big_n) {
            let expression = self.solve_t(&key, &k)?;
            out.push(RelationRecord { genus: g, monomial: Monomial { psi: k, kappa: Vec::new() }, expression });
        }
        Ok(out)
    }

    /// Substitutes the current eliminations into every coefficient
    /// extraction performed so far; each must vanish identically.
    pub fn verify_relations(&self) -> Result<usize> {
        for rel in &self.generating {
            let mut total = rel.boundary.clone();
            for (kp, coeff) in &rel.open {
                let Some(e) = self.solved.get(&(rel.engine.clone(), kp.clone())) else {
                    return Err(Error::Defect(format!("no elimination recorded for {}", psi_text(kp))));
                };
                total.add_scaled(&e.value, coeff)?;
            }
            if !total.is_zero() {
                return Err(Error::Defect(format!("substituted relation is not zero:\n{}", total.describe())));
            }
        }
        Ok(self.generating.len())
    }

    /// The relation produced by `a_monomial` with Ψ_C = `multiplier` on
    /// M̄_{g,2g+3}, pushed to M̄_{g,n}: 2^{g+1}(g+1)! times the coefficient.
    pub fn pushforward_relation(&mut self, g: u32, n: u32, multiplier: &[u32], a_monomial: &[u32]) -> Result<TautClass> {
        let big_n = 2 * g as usize + 3;
        if multiplier.len() != big_n || n as usize > g as usize {
            return Err(Error::InvalidInput(format!("need {big_n} multiplier exponents and n ≤ g")));
        }
        if multiplier[n as usize..big_n - 1].iter().any(|&c| c == 0) {
            return Err(Error::InvalidInput("Ψ_C must contain ψ_i for n < i ≤ 2g+2".into()));
        }
        if a_monomial.len() != big_n - 1 || a_monomial[..n as usize].iter().any(|&m| m == 0) {
            return Err(Error::InvalidInput(format!("a-monomial must be a multiple of a1…a{n}")));
        }
        let key: EngineKey = (g, multiplier.to_vec(), n);
        let relation = self.engine(&key)?.coefficient(a_monomial)?;
        let mut open_class = TautClass::zero(g, n);
        for kp in compositions(g + 1, big_n) {
            let coeff = open_coefficient(g, a_monomial, &kp);
            if !coeff.is_zero() {
                open_class.add_scaled(&self.t_class(&key, &kp)?, &coeff)?;
            }
        }
        let boundary = relation.sub(&open_class)?;
        if let Some((s, _)) = boundary.terms().find(|(s, _)| s.num_edges() == 0) {
            return Err(Error::Defect(format!("boundary terms push forward to the open term {}", s.describe())));
        }
        Ok(relation)
    }

    /// Expresses `monomial` on M̄_{g,n} as a class supported on the boundary.
    pub fn boundary_expression(&mut self, g: u32, monomial: &Monomial) -> Result<BoundaryExpression> {
        let n = monomial.markings();
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Err(Error::InvalidInput(format!("M({g},{n}) is not stable")));
        }
        let k = monomial.degree();
        let threshold = if n == 0 { g - 1 } else { g.max(1) };
        if k < threshold {
            return Err(Error::BelowThreshold { g, n, degree: k, threshold });
        }
        let key = (g, monomial.clone());
        if let Some(e) = self.memo.get(&key) {
            return Ok(e.clone());
        }
        if let Some(db) = &self.db {
            if let Some(e) = db.get(g, monomial)? {
                self.memo.insert(key, e.clone());
                return Ok(e);
            }
        }
        let e = self.derive(g, monomial)?;
        if let Some(db) = &mut self.db {
            db.insert(g, monomial, &e)?;
        }
        self.memo.insert(key, e.clone());
        Ok(e)
    }

    fn derive(&mut self, g: u32, mu: &Monomial) -> Result<BoundaryExpression> {
        let n = mu.markings();
        let class = mu.class(g)?;
        if class.is_zero() {
            return Ok(BoundaryExpression::zero(g, n, "exceeds the dimension"));
        }
        let all_positive = mu.psi.iter().all(|&d| d > 0);
        if g == 0 {
            return self.by_pullback(g, mu);
        }
        if n == 0 {
            return self.by_marked_point(g, mu);
        }
        if all_positive && n > g {
            return self.by_factor(g, mu);
        }
        if all_positive || n == 1 {
            return self.by_pushforward(g, mu);
        }
        self.by_pullback(g, mu)
    }

    /// Monomials on M̄_{g,n}, n ≤ g, divisible by ψ_1⋯ψ_n, and κ-monomials on
    /// M̄_{g,1}: push ψ^D forward from M̄_{g,2g+3}.
    fn by_pushforward(&mut self, g: u32, mu: &Monomial) -> Result<BoundaryExpression> {
        let n = mu.markings() as usize;
        let big_n = 2 * g as usize + 3;
        let l = mu.kappa.len();
        if n + l > big_n {
            let mut shorter = mu.clone();
            let b = shorter.kappa.pop().expect("non-empty κ part");
            let e = self.boundary_expression(g, &shorter)?;
            let mut provenance = e.provenance.clone();
            provenance.push(ProvenanceStep {
                relation: format!("boundary expression of {shorter}"),
                a_monomial: String::new(),
                manipulation: format!("multiply by kappa{b}"),
            });
            return BoundaryExpression::new(e.value.mul_kappa(b)?, provenance);
        }
        let mut d = vec![1u32; big_n];
        d[..n].copy_from_slice(&mu.psi);
        for (i, &b) in mu.kappa.iter().enumerate() {
            d[n + i] = b + 1;
        }
        let zeros = d.iter().filter(|&&x| x == 0).count() as u32;
        let mut k = vec![0u32; big_n];
        for i in 0..n {
            k[i] = u32::from(d[i] > 0);
        }
        k[big_n - 1] = zeros.min(1);
        let upper: Vec<u32> = (0..big_n)
            .map(|i| if i < n || i == big_n - 1 { d[i] } else { d[i] - 1 })
            .collect();
        let mut remaining = (g + 1)
            .checked_sub(k.iter().sum::<u32>())
            .ok_or_else(|| Error::Elimination(format!("no admissible split of {}", psi_text(&d))))?;
        for i in 0..big_n {
            let add = (upper[i] - k[i]).min(remaining);
            k[i] += add;
            remaining -= add;
        }
        let unmarked = (0..n).filter(|&i| k[i] == 0).count() as u32;
        if remaining > 0 || unmarked.min(1) > k[big_n - 1] {
            return Err(Error::Elimination(format!("no admissible split of {}", psi_text(&d))));
        }
        let c: Vec<u32> = d.iter().zip(&k).map(|(a, b)| a - b).collect();
        let key: EngineKey = (g, c, n as u32);
        let pushed = self.t_class(&key, &k)?;
        let et = self.solve_t(&key, &k)?;
        let mut lead = None;
        let mut acc = et.value.clone();
        let mut provenance = et.provenance.clone();
        for (s, coeff) in pushed.terms() {
            let nu = Monomial::from_stratum(s)
                .ok_or_else(|| Error::Defect(format!("pushforward of ψ^D has the boundary term {}", s.describe())))?;
            if &nu == mu {
                lead = Some(coeff.clone());
                continue;
            }
            if nu.psi != mu.psi || nu.kappa.len() >= mu.kappa.len() {
                return Err(Error::Defect(format!("unexpected term {nu} in the pushforward for {mu}")));
            }
            let sub = self.boundary_expression(g, &nu)?;
            acc.add_scaled(&sub.value, &-coeff.clone())?;
            provenance.extend(sub.provenance);
        }
        let lead = lead.ok_or_else(|| Error::Elimination(format!("{mu} does not occur in Π_*{}", psi_text(&d))))?;
        provenance.push(ProvenanceStep {
            relation: format!("pushforward of {} to M({g},{n})", psi_text(&d)),
            a_monomial: String::new(),
            manipulation: format!("divide by {lead}"),
        });
        BoundaryExpression::new(acc.scale(&(Rational::one() / lead)), provenance)
    }

    /// Monomials with a leg of ψ exponent zero: pull back from one leg fewer.
    fn by_pullback(&mut self, g: u32, mu: &Monomial) -> Result<BoundaryExpression> {
        let n = mu.markings();
        let j = (1..=n)
            .rev()
            .find(|&i| mu.psi[i as usize - 1] == 0)
            .ok_or_else(|| Error::Defect(format!("{mu} has no leg without ψ")))?;
        let perm: Vec<u32> = (1..=n).map(|i| if i == j { n } else if i < j { i } else { i - 1 }).collect();
        let mut inverse = vec![0u32; n as usize];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new as usize - 1] = old as u32 + 1;
        }
        let moved = mu.relabel(&perm);
        let y = Monomial { psi: moved.psi[..n as usize - 1].to_vec(), kappa: moved.kappa.clone() };
        let ey = self.boundary_expression(g, &y)?;
        let pulled = TautClass::pullback_of(&y.stratum(g)?);
        let mut acc = ey.value.pullback();
        let mut provenance = ey.provenance.clone();
        let mut seen_self = false;
        for (s, coeff) in pulled.terms() {
            if s.num_edges() > 0 {
                acc.add_scaled(&TautClass::single(s.clone(), Rational::one()), &-coeff.clone())?;
                continue;
            }
            let nu = Monomial::from_stratum(s).expect("single vertex");
            if nu == moved {
                if !coeff.is_one() {
                    return Err(Error::Defect(format!("{moved} occurs with coefficient {coeff} in π^*{y}")));
                }
                seen_self = true;
                continue;
            }
            if nu.psi[n as usize - 1] == 0 {
                return Err(Error::Defect(format!("unexpected term {nu} in π^*{y}")));
            }
            let sub = self.boundary_expression(g, &nu)?;
            acc.add_scaled(&sub.value, &-coeff.clone())?;
            provenance.extend(sub.provenance);
        }
        if !seen_self {
            return Err(Error::Defect(format!("{moved} does not occur in π^*{y}")));
        }
        provenance.push(ProvenanceStep {
            relation: format!("pullback of {y} from M({g},{})", n - 1),
            a_monomial: String::new(),
            manipulation: format!("move leg {j} last and subtract the other terms"),
        });
        BoundaryExpression::new(acc.relabel_legs(&inverse)?, provenance)
    }

    /// n > g and ψ_1⋯ψ_n divides the monomial: multiply the expression for
    /// ψ_1⋯ψ_g.
    fn by_factor(&mut self, g: u32, mu: &Monomial) -> Result<BoundaryExpression> {
        let n = mu.markings() as usize;
        let mut base = vec![0u32; n];
        for b in base.iter_mut().take(g as usize) {
            *b = 1;
        }
        let base = Monomial { psi: base, kappa: Vec::new() };
        let e = self.boundary_expression(g, &base)?;
        let mut value = e.value.clone();
        for (i, &d) in mu.psi.iter().enumerate() {
            let extra = if i < g as usize { d - 1 } else { d };
            for _ in 0..extra {
                value = value.mul_psi(i as u32 + 1)?;
            }
        }
        for &b in &mu.kappa {
            value = value.mul_kappa(b)?;
        }
        let mut provenance = e.provenance.clone();
        provenance.push(ProvenanceStep {
            relation: format!("boundary expression of {base}"),
            a_monomial: String::new(),
            manipulation: format!("multiply to {mu}"),
        });
        BoundaryExpression::new(value, provenance)
    }

    /// κ-monomials on M̄_g: push κ_b·ψ_1 forward from M̄_{g,1}.
    fn by_marked_point(&mut self, g: u32, mu: &Monomial) -> Result<BoundaryExpression> {
        let z = Monomial { psi: vec![1], kappa: mu.kappa.clone() };
        let ez = self.boundary_expression(g, &z)?;
        let pushed = z.class(g)?.pushforward()?;
        let mut acc = ez.value.pushforward()?;
        let mut provenance = ez.provenance.clone();
        let mut lead = None;
        for (s, coeff) in pushed.terms() {
            let nu = Monomial::from_stratum(s)
                .ok_or_else(|| Error::Defect(format!("pushforward of {z} has the boundary term {}", s.describe())))?;
            if &nu == mu {
                lead = Some(coeff.clone());
                continue;
            }
            if nu.kappa.len() >= mu.kappa.len() {
                return Err(Error::Defect(format!("unexpected term {nu} in π_*{z}")));
            }
            let sub = self.boundary_expression(g, &nu)?;
            acc.add_scaled(&sub.value, &-coeff.clone())?;
            provenance.extend(sub.provenance);
        }
        let lead = lead.ok_or_else(|| Error::Elimination(format!("{mu} does not occur in π_*{z}")))?;
        provenance.push(ProvenanceStep {
            relation: format!("pushforward of {z} from M({g},1)"),
            a_monomial: String::new(),
            manipulation: format!("divide by {lead}"),
        });
        BoundaryExpression::new(acc.scale(&(Rational::one() / lead)), provenance)
    }

    /// Rewrites every vertex whose decoration has degree above
    /// max(g(v) - 1, 0) until each stratum has property ⋆.
    pub fn theorem_star_reduce(&mut self, c: &TautClass) -> Result<TautClass> {
        let mut current = c.clone();
        loop {
            let mut next = TautClass::zero(c.genus(), c.markings());
            let mut changed = false;
            let terms: Vec<(Stratum, Rational)> = current.terms().map(|(s, x)| (s.clone(), x.clone())).collect();
            for (s, coeff) in terms {
                let bad = (0..s.num_vertices()).find(|&v| s.vertex_degree(v) > s.vertex_genus(v).saturating_sub(1));
                let Some(v) = bad else {
                    next.push(s, coeff);
                    continue;
                };
                changed = true;
                let local = s.local_at(v);
                let mu = Monomial::from_stratum(&local).expect("local stratum has one vertex");
                let e = self.boundary_expression(s.vertex_genus(v), &mu)?;
                for (t, x) in e.value.terms() {
                    next.push(s.substitute_vertex(v, t), coeff.clone() * x);
                }
            }
            current = next;
            if !changed {
                break;
            }
        }
        star_census(&current)?;
        Ok(current)
    }
}

/// Checks that every stratum of codimension k has at least k - g + 1
/// vertices of genus zero.
pub fn star_census(c: &TautClass) -> Result<()> {
    let g = c.genus() as i64;
    for (s, _) in c.terms() {
        let rational = s.genera().iter().filter(|&&x| x == 0).count() as i64;
        let k = s.codimension() as i64;
        if rational < k - g + 1 {
            return Err(Error::Defect(format!(
                "stratum {} of codimension {k} has only {rational} rational components",
                s.describe()
            )));
        }
    }
    Ok(())
}
