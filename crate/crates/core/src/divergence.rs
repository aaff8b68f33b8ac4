//! Batch comparison of a world distribution with a mind's code lengths.
//!
//! World complexity is `C_W(i) = log2(1/p_i)`, mind complexity is the code
//! length `C_D(i)` with implied mass `d_i = 2^-C_D(i)`. The three divergences
//! average `U(i) = C_W(i) - C_D(i)` under the world, uniform and mind weights
//! respectively, and each is cross-checked against its KL form.

use serde::Serialize;

use crate::distribution::{CodeLengthTable, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};
use crate::symbol::SymbolId;

/// `sum p log2(1/p)` with `0 log 0 = 0`.
pub fn entropy<S: Scalar>(p: &DiscreteDistribution<S>) -> S {
    compensated_sum(
        p.masses()
            .iter()
            .filter(|&&x| x > S::zero())
            .map(|&x| -x * x.log2()),
    )
}

/// Masses of `q` in the order of `p`'s support.
fn aligned_masses<S: Scalar>(p: &DiscreteDistribution<S>, q: &DiscreteDistribution<S>) -> Result<Vec<S>> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch(format!(
            "{} symbols vs {} symbols",
            p.len(),
            q.len()
        )));
    }
    p.support()
        .iter()
        .map(|s| {
            q.mass_of(s.as_str())
                .ok_or_else(|| Error::SupportMismatch(format!("symbol {s:?} missing")))
        })
        .collect()
}

/// Terms `p f(p, q)` over `p > 0`; infinite (with a warning) where `q = 0 < p`.
fn weighted_log_sum<S: Scalar>(p: &[S], q: &[S], f: impl Fn(S, S) -> S, what: &str) -> S {
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= S::zero() {
            continue;
        }
        if qi <= S::zero() {
            log::warn!("{what}: reference mass is zero where the weight is positive; result is +inf");
            return S::infinity();
        }
        terms.push(pi * f(pi, qi));
    }
    compensated_sum(terms)
}

/// `sum p log2(1/q)`.
pub fn cross_entropy<S: Scalar>(p: &DiscreteDistribution<S>, q: &DiscreteDistribution<S>) -> Result<S> {
    let q = aligned_masses(p, q)?;
    Ok(weighted_log_sum(p.masses(), &q, |_, qi| -qi.log2(), "cross-entropy"))
}

/// `sum p log2(p/q)`.
pub fn kl<S: Scalar>(p: &DiscreteDistribution<S>, q: &DiscreteDistribution<S>) -> Result<S> {
    let q = aligned_masses(p, q)?;
    Ok(kl_masses(p.masses(), &q))
}

fn kl_masses<S: Scalar>(p: &[S], q: &[S]) -> S {
    weighted_log_sum(p, q, |pi, qi| (pi / qi).log2(), "kl")
}

/// `log2 n`: bits to single out one of `n` states.
pub fn variety<S: Scalar>(n: usize) -> Result<S> {
    if n == 0 {
        return Err(Error::param("n", "variety needs at least one state"));
    }
    Ok(S::of_usize(n).log2())
}

/// Mean description cost over the support.
pub fn variety_hat<S: Scalar>(mind: &CodeLengthTable<S>) -> S {
    compensated_sum(mind.lengths().iter().map(|l| l.value())) / S::of_usize(mind.len())
}

/// `sum d_i C_D(i)`, the entropy of the mind's implied distribution.
///
/// With `normalize` the lengths are first shifted by `log2(Kraft sum)`;
/// otherwise the Kraft sum must be one.
pub fn variety_star<S: Scalar>(mind: &CodeLengthTable<S>, normalize: bool) -> Result<S> {
    let d = crate::distribution::distribution_from_code(mind, normalize)?;
    Ok(entropy(&d))
}

/// `N log2 N`: one index per item, order discarded.
pub fn memory_cost_unordered<S: Scalar>(n: u64) -> Result<S> {
    if n == 0 {
        return Err(Error::param("n", "memory cost needs at least one item"));
    }
    let n = S::from_u64(n).expect("count representable");
    Ok(n * n.log2())
}

/// `log2(N!) + log2 N`, summed exactly term by term.
pub fn memory_cost_ordered<S: Scalar>(n: u64) -> Result<S> {
    if n == 0 {
        return Err(Error::param("n", "memory cost needs at least one item"));
    }
    let log_fact = compensated_sum((2..=n).map(|k| S::from_u64(k).expect("count representable").log2()));
    Ok(log_fact + S::from_u64(n).expect("count representable").log2())
}

/// World distribution and mind code over one shared, identically ordered support.
#[derive(Debug, Clone, PartialEq)]
pub struct MachinePair<S> {
    world: DiscreteDistribution<S>,
    mind: CodeLengthTable<S>,
}

impl<S: Scalar> MachinePair<S> {
    /// Reorders the mind to follow the world's support.
    pub fn new(world: DiscreteDistribution<S>, mind: CodeLengthTable<S>) -> Result<Self> {
        let mind = mind.aligned_to(world.support())?;
        Ok(MachinePair { world, mind })
    }

    pub fn world(&self) -> &DiscreteDistribution<S> {
        &self.world
    }

    pub fn mind(&self) -> &CodeLengthTable<S> {
        &self.mind
    }

    pub fn len(&self) -> usize {
        self.world.len()
    }

    pub fn is_empty(&self) -> bool {
        self.world.is_empty()
    }

    /// `C_W(i)`, infinite for zero-mass symbols.
    pub fn world_costs(&self) -> Vec<S> {
        self.world.information().into_iter().map(|b| b.value()).collect()
    }

    pub fn mind_costs(&self) -> Vec<S> {
        self.mind.lengths().iter().map(|l| l.value()).collect()
    }

    /// `U(i) = C_W(i) - C_D(i)`.
    pub fn unexpectedness(&self) -> Vec<S> {
        self.world_costs()
            .into_iter()
            .zip(self.mind_costs())
            .map(|(w, d)| w - d)
            .collect()
    }

    /// Same pair with mind lengths shifted so the Kraft sum is one.
    pub fn normalized(&self) -> Result<Self> {
        let k = self.mind.kraft_sum();
        let shift = k.log2();
        let lengths = self
            .mind_costs()
            .into_iter()
            .map(|c| (c + shift).max(S::zero()))
            .collect();
        Ok(MachinePair {
            world: self.world.clone(),
            mind: CodeLengthTable::new(self.mind.support().to_vec(), lengths)?,
        })
    }

    fn mind_masses(&self) -> Vec<S> {
        self.mind.lengths().iter().map(|l| l.to_probability()).collect()
    }
}

/// `sum w_i U(i)` over `w_i > 0`.
fn weighted_u<S: Scalar>(weights: &[S], u: &[S]) -> S {
    compensated_sum(
        weights
            .iter()
            .zip(u)
            .filter(|(w, _)| **w > S::zero())
            .map(|(&w, &ui)| w * ui),
    )
}

fn agree<S: Scalar>(quantity: &'static str, weighted: S, closed_form: S, scale: S) -> Result<S> {
    let ok = if weighted.is_infinite() || closed_form.is_infinite() {
        weighted == closed_form
    } else {
        (weighted - closed_form).abs() <= S::tolerance() * (S::one() + scale)
    };
    if !ok {
        return Err(Error::IdentityMismatch {
            quantity,
            weighted: weighted.to_f64_lossy(),
            closed_form: closed_form.to_f64_lossy(),
        });
    }
    Ok(weighted)
}

fn magnitude<S: Scalar>(weights: &[S], u: &[S]) -> S {
    compensated_sum(
        weights
            .iter()
            .zip(u)
            .filter(|(w, _)| **w > S::zero())
            .map(|(&w, &ui)| (w * ui).abs()),
    )
}

/// `sum p_i U(i) = -KL(W || d)`. Needs a Kraft sum of at most one; a
/// sub-normalised mind is accepted as-is.
pub fn world_relative<S: Scalar>(pair: &MachinePair<S>) -> Result<S> {
    let kraft = pair.mind.kraft_sum();
    if kraft > S::one() + S::tolerance() {
        return Err(Error::KraftViolation {
            sum: kraft.to_f64_lossy(),
        });
    }
    let p = pair.world.masses();
    let u = pair.unexpectedness();
    let closed = -kl_masses(p, &pair.mind_masses());
    agree("D_wrel", weighted_u(p, &u), closed, magnitude(p, &u))
}

/// `(1/N) sum U(i) = KL(U || W) - KL(U || d)`.
pub fn absolute<S: Scalar>(pair: &MachinePair<S>) -> Result<S> {
    let n = pair.len();
    let uniform = vec![S::one() / S::of_usize(n); n];
    let u = pair.unexpectedness();
    let closed = kl_masses(&uniform, pair.world.masses()) - kl_masses(&uniform, &pair.mind_masses());
    agree("D_abs", weighted_u(&uniform, &u), closed, magnitude(&uniform, &u))
}

/// `sum d_i U(i) = KL(D || W)`. The mind's Kraft sum must be one.
pub fn mind_relative<S: Scalar>(pair: &MachinePair<S>) -> Result<S> {
    crate::distribution::distribution_from_code(&pair.mind, false)?;
    let d = pair.mind_masses();
    let u = pair.unexpectedness();
    let closed = kl_masses(&d, pair.world.masses());
    agree("D_drel", weighted_u(&d, &u), closed, magnitude(&d, &u))
}

/// Symbols with `C_D <= tau` and `C_W > 2 tau` (unsound), and with
/// `C_W <= tau` and `C_D > 2 tau` (incomplete).
pub fn soundness_completeness<S: Scalar>(
    pair: &MachinePair<S>,
    tau: S,
) -> Result<(Vec<SymbolId>, Vec<SymbolId>)> {
    if !(tau > S::zero()) || !tau.is_finite() {
        return Err(Error::param("tau", "must be a positive number of bits"));
    }
    let two_tau = tau + tau;
    let mut unsound = Vec::new();
    let mut incomplete = Vec::new();
    for ((s, cw), cd) in pair
        .world
        .support()
        .iter()
        .zip(pair.world_costs())
        .zip(pair.mind_costs())
    {
        if cd <= tau && cw > two_tau {
            unsound.push(s.clone());
        }
        if cw <= tau && cd > two_tau {
            incomplete.push(s.clone());
        }
    }
    Ok((unsound, incomplete))
}

/// Support symbols the world never generates.
pub fn zero_mass_symbols<S: Scalar>(world: &DiscreteDistribution<S>) -> Vec<SymbolId> {
    world
        .iter()
        .filter(|(_, p)| *p == S::zero())
        .map(|(s, _)| s.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceOptions<S> {
    /// Shift mind lengths so the Kraft sum is one before anything is computed.
    pub normalize_mind: bool,
    pub tau: S,
}

impl<S: Scalar> Default for DivergenceOptions<S> {
    fn default() -> Self {
        DivergenceOptions {
            normalize_mind: false,
            tau: S::of(2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolTerm<S> {
    pub symbol: SymbolId,
    pub p: S,
    pub d: S,
    pub c_w: S,
    pub c_d: S,
    pub u: S,
}

/// Every comparison between one world and one mind. Serialises flat;
/// infinities become `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport<S> {
    #[serde(rename = "H")]
    pub entropy: S,
    #[serde(rename = "V")]
    pub variety: S,
    #[serde(rename = "V_hat")]
    pub variety_hat: S,
    #[serde(rename = "V_star")]
    pub variety_star: S,
    /// `H - V`.
    #[serde(rename = "D")]
    pub d: S,
    #[serde(rename = "D_wrel")]
    pub d_wrel: S,
    #[serde(rename = "D_abs")]
    pub d_abs: S,
    #[serde(rename = "D_drel")]
    pub d_drel: S,
    pub kraft_sum: S,
    pub normalized: bool,
    pub tau: S,
    pub unsound_symbols: Vec<SymbolId>,
    pub incomplete_symbols: Vec<SymbolId>,
    pub zero_mass_symbols: Vec<SymbolId>,
    pub symbols: Vec<SymbolTerm<S>>,
}

/// Full report. Without `normalize_mind` the mind must be a complete code
/// (Kraft sum one): above one is a `kraft-violation`, below one an
/// `improper-distribution`.
pub fn divergences<S: Scalar>(pair: &MachinePair<S>, opts: DivergenceOptions<S>) -> Result<DivergenceReport<S>> {
    let kraft_sum = pair.mind.kraft_sum();
    let pair = if opts.normalize_mind {
        pair.normalized()?
    } else {
        pair.clone()
    };
    let d_wrel = world_relative(&pair)?;
    let d_drel = mind_relative(&pair)?;
    let d_abs = absolute(&pair)?;
    let (unsound, incomplete) = soundness_completeness(&pair, opts.tau)?;

    let h = entropy(&pair.world);
    let v = variety(pair.len())?;
    let d = pair.mind_masses();
    let symbols = pair
        .world
        .iter()
        .zip(&d)
        .zip(pair.world_costs().into_iter().zip(pair.mind_costs()))
        .map(|(((s, p), &di), (c_w, c_d))| SymbolTerm {
            symbol: s.clone(),
            p,
            d: di,
            c_w,
            c_d,
            u: c_w - c_d,
        })
        .collect();
    Ok(DivergenceReport {
        entropy: h,
        variety: v,
        variety_hat: variety_hat(&pair.mind),
        variety_star: variety_star(&pair.mind, false)?,
        d: h - v,
        d_wrel,
        d_abs,
        d_drel,
        kraft_sum,
        normalized: opts.normalize_mind,
        tau: opts.tau,
        unsound_symbols: unsound,
        incomplete_symbols: incomplete,
        zero_mass_symbols: zero_mass_symbols(&pair.world),
        symbols,
    })
}

impl<S: Scalar> DivergenceReport<S> {
    /// Two-section CSV: summary `quantity,value` rows, a blank line, then the
    /// per-symbol table.
    pub fn to_csv(&self) -> String {
        fn num<S: Scalar>(x: S) -> String {
            if x.is_finite() {
                format!("{x:.6}")
            } else {
                "inf".into()
            }
        }
        let mut out = String::from("quantity,value\n");
        for (k, v) in [
            ("H", self.entropy),
            ("V", self.variety),
            ("V_hat", self.variety_hat),
            ("V_star", self.variety_star),
            ("D", self.d),
            ("D_wrel", self.d_wrel),
            ("D_abs", self.d_abs),
            ("D_drel", self.d_drel),
            ("kraft_sum", self.kraft_sum),
        ] {
            out.push_str(&format!("{k},{}\n", num(v)));
        }
        out.push_str("\nsymbol,p,d,c_w,c_d,u,unsound,incomplete\n");
        for t in &self.symbols {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                t.symbol,
                num(t.p),
                num(t.d),
                num(t.c_w),
                num(t.c_d),
                num(t.u),
                self.unsound_symbols.contains(&t.symbol),
                self.incomplete_symbols.contains(&t.symbol),
            ));
        }
        out
    }
}
