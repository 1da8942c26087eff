use std::collections::HashMap;

use super::lattice::lattice_edges;
use super::model::{AlignmentModel, Chunk};
use super::{log_add, AlignmentConfig};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::lexicon::PairedLexicon;
use crate::phone::Phone;

#[derive(Clone, Copy)]
struct Edge {
    from: u32,
    to: u32,
    param: u32,
}

/// A pair's lattice with every edge resolved to an interned chunk-pair id.
struct CompiledLattice {
    states: usize,
    edges: Vec<Edge>,
}

#[derive(Default)]
struct Interner {
    chunks: HashMap<Vec<Phone>, u32>,
    chunk_list: Vec<Chunk>,
    params: HashMap<(u32, u32), u32>,
    /// (source chunk id, target chunk id) per parameter.
    param_list: Vec<(u32, u32)>,
}

impl Interner {
    fn chunk(&mut self, phones: &[Phone]) -> u32 {
        if let Some(&id) = self.chunks.get(phones) {
            return id;
        }
        let id = self.chunk_list.len() as u32;
        self.chunks.insert(phones.to_vec(), id);
        self.chunk_list.push(Chunk::from(phones));
        id
    }

    fn param(&mut self, source: &[Phone], target: &[Phone]) -> u32 {
        let key = (self.chunk(source), self.chunk(target));
        let next = self.param_list.len() as u32;
        *self.params.entry(key).or_insert_with(|| {
            self.param_list.push(key);
            next
        })
    }
}

/// Posterior edge counts and log-likelihood of one lattice.
fn forward_backward(lattice: &CompiledLattice, log_probs: &[f64]) -> (f64, Vec<f64>) {
    let mut alpha = vec![f64::NEG_INFINITY; lattice.states];
    let mut beta = vec![f64::NEG_INFINITY; lattice.states];
    alpha[0] = 0.0;
    beta[lattice.states - 1] = 0.0;
    for e in &lattice.edges {
        let to = e.to as usize;
        alpha[to] = log_add(
            alpha[to],
            alpha[e.from as usize] + log_probs[e.param as usize],
        );
    }
    for e in lattice.edges.iter().rev() {
        let from = e.from as usize;
        beta[from] = log_add(
            beta[from],
            log_probs[e.param as usize] + beta[e.to as usize],
        );
    }
    let total = alpha[lattice.states - 1];
    if total == f64::NEG_INFINITY {
        return (total, vec![0.0; lattice.edges.len()]);
    }
    let posteriors = lattice
        .edges
        .iter()
        .map(|e| {
            let lp = alpha[e.from as usize] + log_probs[e.param as usize] + beta[e.to as usize];
            (lp - total).exp()
        })
        .collect();
    (total, posteriors)
}

/// Stateful EM over a fixed paired lexicon.
///
/// Each [`step`](EmTrainer::step) runs one E-step (recording the corpus
/// log-likelihood under the current table) followed by one M-step.
pub struct EmTrainer {
    config: AlignmentConfig,
    execution: Execution,
    interner: Interner,
    lattices: Vec<CompiledLattice>,
    probs: Vec<f64>,
    history: Vec<f64>,
    provenance: String,
}

impl EmTrainer {
    /// Compiles every lattice and starts from the uniform table.
    pub fn new(paired: &PairedLexicon, config: &AlignmentConfig) -> Result<Self> {
        config.validate()?;
        if paired.is_empty() {
            return Err(Error::Empty("paired lexicon"));
        }
        let mut interner = Interner::default();
        let mut lattices = Vec::with_capacity(paired.len());
        for pair in &paired.pairs {
            let (src, tgt) = (&pair.source, &pair.target);
            if src.is_empty() || tgt.is_empty() {
                return Err(Error::Config(format!(
                    "empty pronunciation for {:?}",
                    pair.word
                )));
            }
            let layout = lattice_edges(src.len(), tgt.len(), config);
            if layout.is_empty() {
                return Err(Error::Unalignable {
                    word: pair.word.clone(),
                });
            }
            let cols = tgt.len() + 1;
            let edges = layout
                .iter()
                .map(|e| Edge {
                    from: e.from_state(cols) as u32,
                    to: e.to_state(cols) as u32,
                    param: interner
                        .param(&src[e.i..e.i + e.source_len], &tgt[e.j..e.j + e.target_len]),
                })
                .collect();
            lattices.push(CompiledLattice {
                states: (src.len() + 1) * cols,
                edges,
            });
        }

        let mut fanout = vec![0u32; interner.chunk_list.len()];
        for &(s, _) in &interner.param_list {
            fanout[s as usize] += 1;
        }
        let probs = interner
            .param_list
            .iter()
            .map(|&(s, _)| 1.0 / fanout[s as usize] as f64)
            .collect();

        Ok(EmTrainer {
            config: config.clone(),
            execution: Execution::default(),
            interner,
            lattices,
            probs,
            history: Vec::new(),
            provenance: paired.fingerprint(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn num_parameters(&self) -> usize {
        self.probs.len()
    }

    /// Expected chunk-pair counts and corpus log-likelihood under the current
    /// table. Per-pair work may run in parallel; the reduction is always in
    /// pair order.
    pub fn expectation(&self) -> (f64, Vec<f64>) {
        let log_probs: Vec<f64> = self
            .probs
            .iter()
            .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
            .collect();
        let per_pair = map_ordered(self.execution, &self.lattices, |lat| {
            forward_backward(lat, &log_probs)
        });
        let mut counts = vec![0.0; self.probs.len()];
        let mut total = 0.0;
        for (lattice, (ll, posteriors)) in self.lattices.iter().zip(per_pair) {
            total += ll;
            for (e, c) in lattice.edges.iter().zip(posteriors) {
                counts[e.param as usize] += c;
            }
        }
        (total, counts)
    }

    /// Renormalizes expected counts per source chunk.
    fn maximize(&mut self, counts: &[f64]) {
        let mut totals = vec![0.0; self.interner.chunk_list.len()];
        for (&(s, _), &c) in self.interner.param_list.iter().zip(counts) {
            totals[s as usize] += c;
        }
        for ((p, &(s, _)), &c) in self
            .probs
            .iter_mut()
            .zip(&self.interner.param_list)
            .zip(counts)
        {
            let total = totals[s as usize];
            *p = if total > 0.0 { c / total } else { 0.0 };
        }
    }

    /// One EM iteration; returns the log-likelihood before the update.
    pub fn step(&mut self) -> f64 {
        let (ll, counts) = self.expectation();
        self.history.push(ll);
        self.maximize(&counts);
        ll
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    /// Iterates until `max_iterations` updates have run or the relative
    /// log-likelihood gain drops below `rel_tolerance`. The returned
    /// history ends with the likelihood of the final table.
    pub fn run(mut self) -> AlignmentModel {
        let mut updates = 0;
        loop {
            let (ll, counts) = self.expectation();
            let converged = self
                .history
                .last()
                .is_some_and(|&prev| (ll - prev) / prev.abs().max(1.0) < self.config.rel_tolerance);
            self.history.push(ll);
            if converged || updates >= self.config.max_iterations {
                break;
            }
            self.maximize(&counts);
            updates += 1;
        }
        self.model()
    }

    /// Snapshot of the current table (positive entries only).
    pub fn model(&self) -> AlignmentModel {
        let chunks = &self.interner.chunk_list;
        let mut model = AlignmentModel::from_entries(
            self.interner
                .param_list
                .iter()
                .zip(&self.probs)
                .map(|(&(s, t), &p)| (chunks[s as usize].clone(), chunks[t as usize].clone(), p)),
        );
        model.log_likelihood_history = self.history.clone();
        model.provenance = Some(self.provenance.clone());
        model
    }
}

/// Uniform table over every chunk pair that lies on some complete path of at
/// least one pair's lattice.
pub fn init_model(paired: &PairedLexicon, config: &AlignmentConfig) -> Result<AlignmentModel> {
    Ok(EmTrainer::new(paired, config)?.model())
}

pub fn train(paired: &PairedLexicon, config: &AlignmentConfig) -> Result<AlignmentModel> {
    train_with(paired, config, Execution::default())
}

pub fn train_with(
    paired: &PairedLexicon,
    config: &AlignmentConfig,
    execution: Execution,
) -> Result<AlignmentModel> {
    Ok(EmTrainer::new(paired, config)?
        .with_execution(execution)
        .run())
}
