use crate::{site_channel, DecayRates, NoiseError, Result};
use qroutesim_core::{ChannelMap, QuditRegister, SupportState};
use qroutesim_gates::{Circuit, GateSpec, Step};
use std::collections::HashMap;

/// Per-site relaxation applied after every scheduled layer, for the layer's
/// duration; idle sites decay too.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    rates: Vec<DecayRates>,
    /// Support states whose population falls to this level are dropped.
    pub prune: f64,
    /// Post-selections keeping less than this are errors.
    pub discard: f64,
}

/// Result of running a circuit on a dense register.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub state: QuditRegister,
    /// Product of post-selection success probabilities.
    pub kept: f64,
}

impl NoiseModel {
    pub fn uniform(n_sites: usize, rates: DecayRates) -> Self {
        Self::per_site(vec![rates; n_sites])
    }

    pub fn per_site(rates: Vec<DecayRates>) -> Self {
        NoiseModel { rates, prune: 1e-24, discard: 1e-12 }
    }

    pub fn noiseless(n_sites: usize) -> Self {
        Self::uniform(n_sites, DecayRates::zero())
    }

    pub fn rates(&self) -> &[DecayRates] {
        &self.rates
    }

    pub fn is_noiseless(&self) -> bool {
        self.rates.iter().all(|r| r.is_zero())
    }

    fn check(&self, circ: &Circuit) -> Result<()> {
        if self.rates.len() != circ.n_sites() {
            return Err(NoiseError::InvalidRates(format!(
                "{} rate records for a {}-site circuit",
                self.rates.len(),
                circ.n_sites()
            )));
        }
        for r in &self.rates {
            r.validate()?;
        }
        Ok(())
    }

    fn channels(&self, circ: &Circuit) -> Result<HashMap<(usize, u64), ChannelMap>> {
        let mut cache = HashMap::new();
        for step in circ.steps() {
            if let Step::Layer(l) = step {
                for (site, r) in self.rates.iter().enumerate() {
                    if r.is_zero() || l.duration_ns == 0.0 {
                        continue;
                    }
                    let key = (site, l.duration_ns.to_bits());
                    if !cache.contains_key(&key) {
                        cache.insert(key, site_channel(r, circ.dims()[site], l.duration_ns * 1e-3)?);
                    }
                }
            }
        }
        Ok(cache)
    }

    fn layer_gates(l: &qroutesim_gates::Layer) -> impl Iterator<Item = &GateSpec> {
        l.virtual_gates.iter().chain(l.gates.iter())
    }

    /// Runs `circ` on a dense register. A pure input stays pure when the model
    /// is noiseless; otherwise it is promoted to a density matrix.
    pub fn run(&self, circ: &Circuit, init: &QuditRegister) -> Result<Outcome> {
        self.check(circ)?;
        if init.dims() != circ.dims() {
            return Err(NoiseError::InvalidRates(format!("register dims {:?} vs circuit {:?}", init.dims(), circ.dims())));
        }
        let noiseless = self.is_noiseless();
        let cache = self.channels(circ)?;
        let mut state = if noiseless { init.clone() } else { init.to_mixed() };
        let mut kept = 1.0;
        for step in circ.steps() {
            match step {
                Step::Layer(l) => {
                    for g in Self::layer_gates(&l) {
                        state = state.apply_gate(&g.matrix(circ.dims())?, &g.sites)?;
                    }
                    if !noiseless && l.duration_ns > 0.0 {
                        for site in 0..circ.n_sites() {
                            if let Some(ch) = cache.get(&(site, l.duration_ns.to_bits())) {
                                state = state.apply_channel(site, ch)?;
                            }
                        }
                    }
                }
                Step::PostSelect { site, forbidden } => {
                    let (s, k) = state.postselect_with(site, forbidden, self.discard)?;
                    state = s;
                    kept *= k;
                }
            }
        }
        Ok(Outcome { state, kept })
    }

    /// Same schedule on a sparse-support density matrix. Returns the product
    /// of post-selection success probabilities.
    pub fn run_support(&self, circ: &Circuit, state: &mut SupportState) -> Result<f64> {
        self.check(circ)?;
        let cache = self.channels(circ)?;
        let mut kept = 1.0;
        for step in circ.steps() {
            match step {
                Step::Layer(l) => {
                    for g in Self::layer_gates(&l) {
                        state.apply_gate(&g.matrix(circ.dims())?, &g.sites)?;
                    }
                    if l.duration_ns > 0.0 {
                        for site in 0..circ.n_sites() {
                            if let Some(ch) = cache.get(&(site, l.duration_ns.to_bits())) {
                                state.apply_channel(site, ch)?;
                            }
                        }
                    }
                    state.prune(self.prune);
                }
                Step::PostSelect { site, forbidden } => kept *= state.postselect(site, forbidden, self.discard)?,
            }
        }
        Ok(kept)
    }
}
