//! NSGA-II search over circuit genomes with (mu + lambda) survivor selection.
//!
//! Each individual is scored on two objectives: test accuracy of the kernel
//! SVM its circuit induces (maximized) and a size cost (minimized). The size
//! cost defaults to the weights-control value `SM * (1 + accuracy^2)`, which
//! raises the pressure on circuit size as accuracy approaches 1.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::genome::{count_gates, decode_genome, random_genome, Genome};
use crate::qsim::{KernelMode, QuantumKernel, DEFAULT_MAX_QUBITS};
use crate::qsvm::{self, SvmParams};
use crate::seed::substream;

/// `(N_local + 2 N_CNOT) / N_qubits`.
pub fn size_metric(n_local: usize, n_cnot: usize, n_qubits: usize) -> f64 {
    (n_local as f64 + 2.0 * n_cnot as f64) / n_qubits as f64
}

/// `SM + SM * accuracy^2`.
pub fn weights_control(sm: f64, accuracy: f64) -> f64 {
    sm + sm * accuracy * accuracy
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub accuracy: f64,
    pub weights_control: f64,
    pub size_metric: f64,
}

impl Objectives {
    pub fn new(accuracy: f64, size_metric: f64) -> Self {
        Self {
            accuracy,
            weights_control: weights_control(size_metric, accuracy),
            size_metric,
        }
    }

    /// The minimized objective under `mode`.
    pub fn cost(&self, mode: ObjectiveMode) -> f64 {
        match mode {
            ObjectiveMode::AccuracyWeightsControl => self.weights_control,
            ObjectiveMode::AccuracySize => self.size_metric,
        }
    }
}

/// Which size measure is paired with accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    #[default]
    AccuracyWeightsControl,
    AccuracySize,
}

impl ObjectiveMode {
    pub fn dominates(self, a: &Objectives, b: &Objectives) -> bool {
        let (ca, cb) = (a.cost(self), b.cost(self));
        a.accuracy >= b.accuracy && ca <= cb && (a.accuracy > b.accuracy || ca < cb)
    }

    /// Largest cost any circuit with `max_layers` layers can reach.
    pub fn max_cost(self, max_layers: usize) -> f64 {
        // every gene a CNOT: SM = 2 N
        let sm = 2.0 * max_layers as f64;
        match self {
            ObjectiveMode::AccuracyWeightsControl => 2.0 * sm,
            ObjectiveMode::AccuracySize => sm,
        }
    }
}

impl std::str::FromStr for ObjectiveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accuracy_wc" | "accuracy_weights_control" => Ok(Self::AccuracyWeightsControl),
            "accuracy_sm" | "accuracy_size" => Ok(Self::AccuracySize),
            other => Err(Error::config(format!(
                "unknown objectives '{other}' (expected 'accuracy_wc' or 'accuracy_sm')"
            ))),
        }
    }
}

/// Higher-or-equal accuracy and lower-or-equal weights control, strictly
/// better in at least one.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    ObjectiveMode::AccuracyWeightsControl.dominates(a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Individual {
    pub genome: Genome,
    pub objectives: Option<Objectives>,
    /// Pareto front index within the last selection pool.
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn new(genome: Genome) -> Self {
        Self {
            genome,
            objectives: None,
            rank: usize::MAX,
            crowding: 0.0,
        }
    }

    pub fn evaluated(genome: Genome, objectives: Objectives) -> Self {
        Self {
            objectives: Some(objectives),
            ..Self::new(genome)
        }
    }

    fn obj(&self) -> &Objectives {
        self.objectives
            .as_ref()
            .expect("individual must be evaluated before selection")
    }
}

/// Everything a fitness evaluation needs besides the genome.
#[derive(Debug, Clone)]
pub struct FitnessContext {
    pub train: Dataset,
    pub test: Dataset,
    pub svm: SvmParams,
    pub kernel_mode: KernelMode,
    pub max_qubits: usize,
}

impl FitnessContext {
    pub fn new(train: Dataset, test: Dataset) -> Self {
        Self {
            train,
            test,
            svm: SvmParams::default(),
            kernel_mode: KernelMode::Real,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }

    pub fn kernel_for(&self, genome: &Genome) -> QuantumKernel {
        QuantumKernel::new(decode_genome(genome))
            .with_mode(self.kernel_mode)
            .with_max_qubits(self.max_qubits)
    }

    /// Decode, train on the train split, score on the test split.
    pub fn try_accuracy(&self, genome: &Genome) -> Result<f64> {
        if self.test.is_empty() {
            return Err(Error::input("test split is empty"));
        }
        let kernel = self.kernel_for(genome);
        let train_states = kernel.states(&self.train.features)?;
        let test_states = kernel.states(&self.test.features)?;
        let gram = kernel.gram_from_states(&train_states, &train_states);
        let model = qsvm::fit_precomputed(&gram, &self.train.labels, &self.svm)?;
        let k_test = kernel.gram_from_states(&test_states, &train_states);
        let predicted = qsvm::predict_precomputed(&model, &k_test);
        qsvm::accuracy(&predicted, &self.test.labels)
    }

    /// Failed trainings (e.g. degenerate data) score accuracy 0.
    pub fn evaluate(&self, genome: &Genome) -> Objectives {
        let circuit = decode_genome(genome);
        let counts = count_gates(&circuit);
        let sm = size_metric(counts.local, counts.cnot, circuit.num_qubits());
        let accuracy = self.try_accuracy(genome).unwrap_or_else(|e| {
            log::debug!("evaluation of {genome} failed: {e}");
            0.0
        });
        Objectives::new(accuracy, sm)
    }
}

pub fn evaluate(genome: &Genome, ctx: &FitnessContext) -> Objectives {
    ctx.evaluate(genome)
}

/// Fast non-dominated sort. Fronts hold indices into `objs`, each front in
/// ascending index order.
pub fn non_dominated_sort(objs: &[Objectives], mode: ObjectiveMode) -> Vec<Vec<usize>> {
    let n = objs.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if mode.dominates(&objs[i], &objs[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if mode.dominates(&objs[j], &objs[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (same order as `front`).
pub fn crowding_distance(objs: &[Objectives], front: &[usize], mode: ObjectiveMode) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut dist = vec![0.0f64; n];
    let getters: [&dyn Fn(&Objectives) -> f64; 2] = [&|o| o.accuracy, &|o| o.cost(mode)];
    for get in getters {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            get(&objs[front[a]])
                .total_cmp(&get(&objs[front[b]]))
                .then(a.cmp(&b))
        });
        let lo = get(&objs[front[order[0]]]);
        let hi = get(&objs[front[order[n - 1]]]);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            let gap = get(&objs[front[order[k + 1]]]) - get(&objs[front[order[k - 1]]]);
            dist[order[k]] += gap / span;
        }
    }
    dist
}

/// Assigns rank and crowding to every member of `pool`.
pub fn assign_rank_and_crowding(pool: &mut [Individual], mode: ObjectiveMode) -> Vec<Vec<usize>> {
    let objs: Vec<Objectives> = pool.iter().map(|i| *i.obj()).collect();
    let fronts = non_dominated_sort(&objs, mode);
    for (rank, front) in fronts.iter().enumerate() {
        let cd = crowding_distance(&objs, front, mode);
        for (&i, d) in front.iter().zip(cd) {
            pool[i].rank = rank;
            pool[i].crowding = d;
        }
    }
    fronts
}

/// Survivor selection over parents and offspring: whole fronts by ascending
/// rank, then the last admitted front by descending crowding distance, ties
/// by genome bits.
pub fn select_mu(mut pool: Vec<Individual>, mu: usize, mode: ObjectiveMode) -> Vec<Individual> {
    let fronts = assign_rank_and_crowding(&mut pool, mode);
    let mut chosen: Vec<usize> = Vec::with_capacity(mu);
    for front in fronts {
        if chosen.len() + front.len() <= mu {
            chosen.extend(front);
        } else {
            let mut rest = front;
            rest.sort_by(|&a, &b| {
                pool[b]
                    .crowding
                    .total_cmp(&pool[a].crowding)
                    .then_with(|| pool[a].genome.bits().cmp(pool[b].genome.bits()))
                    .then(a.cmp(&b))
            });
            chosen.extend(rest.into_iter().take(mu - chosen.len()));
        }
        if chosen.len() == mu {
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    chosen
        .into_iter()
        .map(|i| slots[i].take().expect("each index chosen once"))
        .collect()
}

/// Flips each bit independently with probability `p_ind`.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, p_ind: f64, rng: &mut R) -> Genome {
    let bits = genome
        .bits()
        .iter()
        .map(|&b| if rng.random::<f64>() < p_ind { !b } else { b })
        .collect();
    genome.with_bits(bits).expect("length preserved")
}

/// Exchanges bits `[start, end)` between two parents.
pub fn crossover_at(
    g1: &Genome,
    g2: &Genome,
    start: usize,
    end: usize,
) -> Result<(Genome, Genome)> {
    if g1.bits().len() != g2.bits().len() {
        return Err(Error::input(format!(
            "crossover parents differ in length ({} vs {})",
            g1.bits().len(),
            g2.bits().len()
        )));
    }
    let len = g1.bits().len();
    if start > end || end > len {
        return Err(Error::input(format!(
            "invalid crossover interval [{start}, {end}) for length {len}"
        )));
    }
    let mut a = g1.bits().to_vec();
    let mut b = g2.bits().to_vec();
    a[start..end].swap_with_slice(&mut b[start..end]);
    Ok((g1.with_bits(a)?, g2.with_bits(b)?))
}

/// Two-point crossover with both cut points uniform over `0..=len`.
pub fn crossover<R: Rng + ?Sized>(
    g1: &Genome,
    g2: &Genome,
    rng: &mut R,
) -> Result<(Genome, Genome)> {
    let len = g1.bits().len();
    let p = rng.random_range(0..=len);
    let q = rng.random_range(0..=len);
    crossover_at(g1, g2, p.min(q), p.max(q))
}

/// How crossover and mutation combine when producing offspring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variation {
    /// Crossover with `p_cross` on each parent pair, then each child mutated
    /// with `p_mut`.
    #[default]
    Sequential,
    /// Each child comes from exactly one of crossover (`p_cross`), mutation
    /// (`p_mut`) or cloning (the remaining probability).
    Exclusive,
}

impl std::str::FromStr for Variation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(Self::Sequential),
            "exclusive" => Ok(Self::Exclusive),
            other => Err(Error::config(format!(
                "unknown variation '{other}' (expected 'sequential' or 'exclusive')"
            ))),
        }
    }
}

impl std::fmt::Display for Variation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Sequential => "sequential",
            Self::Exclusive => "exclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStop {
    pub target_accuracy: f64,
    /// Generations without a smaller SM among target-accuracy individuals.
    pub patience: usize,
}

impl Default for EarlyStop {
    fn default() -> Self {
        Self {
            target_accuracy: 1.0,
            patience: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub population_mu: usize,
    pub offspring_lambda: usize,
    pub generations: usize,
    pub p_cross: f64,
    pub p_mut: f64,
    pub p_ind: f64,
    pub num_qubits: usize,
    pub max_layers: usize,
    pub svm: SvmParams,
    pub kernel_mode: KernelMode,
    pub objectives: ObjectiveMode,
    pub max_qubits: usize,
    pub seed: u64,
    pub early_stop: Option<EarlyStop>,
    pub variation: Variation,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_mu: 100,
            offspring_lambda: 15,
            generations: 5000,
            p_cross: 0.3,
            p_mut: 0.7,
            p_ind: 0.2,
            num_qubits: 6,
            max_layers: 6,
            svm: SvmParams::default(),
            kernel_mode: KernelMode::Real,
            objectives: ObjectiveMode::default(),
            max_qubits: DEFAULT_MAX_QUBITS,
            seed: 0,
            early_stop: None,
            variation: Variation::default(),
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_cross", self.p_cross),
            ("p_mut", self.p_mut),
            ("p_ind", self.p_ind),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if self.population_mu == 0 || self.offspring_lambda == 0 {
            return Err(Error::config(
                "population and offspring sizes must be at least 1",
            ));
        }
        if self.num_qubits == 0 || self.max_layers == 0 {
            return Err(Error::config("qubits and layers must be at least 1"));
        }
        if self.num_qubits > self.max_qubits {
            return Err(Error::Capacity {
                requested: self.num_qubits,
                cap: self.max_qubits,
            });
        }
        if let Some(es) = &self.early_stop {
            if !(0.0..=1.0).contains(&es.target_accuracy) {
                return Err(Error::config(
                    "early-stop target accuracy must be in [0, 1]",
                ));
            }
        }
        if self.variation == Variation::Exclusive && self.p_cross + self.p_mut > 1.0 {
            return Err(Error::config(format!(
                "exclusive variation needs p_cross + p_mut <= 1, got {}",
                self.p_cross + self.p_mut
            )));
        }
        self.svm.validate()
    }

    pub fn fitness_context(&self, train: Dataset, test: Dataset) -> FitnessContext {
        FitnessContext {
            svm: self.svm,
            kernel_mode: self.kernel_mode,
            max_qubits: self.max_qubits,
            ..FitnessContext::new(train, test)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_accuracy: f64,
    /// Smallest SM among individuals at `best_accuracy`.
    pub best_sm: f64,
    pub front_size: usize,
    pub hypervolume: f64,
}

pub const HISTORY_HEADER: &str = "generation,best_accuracy,best_sm,front_size,hypervolume";

pub fn write_history_csv<W: Write>(history: &[GenerationStats], mut w: W) -> Result<()> {
    writeln!(w, "{HISTORY_HEADER}")?;
    for s in history {
        write_history_row(s, &mut w)?;
    }
    Ok(())
}

pub fn write_history_row<W: Write>(s: &GenerationStats, mut w: W) -> Result<()> {
    writeln!(
        w,
        "{},{},{},{},{}",
        s.generation, s.best_accuracy, s.best_sm, s.front_size, s.hypervolume
    )?;
    Ok(())
}

/// Area dominated by `(accuracy, cost)` points inside the box
/// `[0, max accuracy] x [cost, cost_ref]`; accuracy maximized, cost minimized.
pub fn hypervolume(points: &[(f64, f64)], cost_ref: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(a, c)| a > 0.0 && c < cost_ref)
        .collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    let mut best_cost = cost_ref;
    for (k, &(acc, cost)) in pts.iter().enumerate() {
        best_cost = best_cost.min(cost);
        let next_acc = pts.get(k + 1).map_or(0.0, |p| p.0);
        area += (acc - next_acc) * (cost_ref - best_cost);
    }
    area
}

/// Snapshot passed to an observer after each generation's selection.
pub struct GenerationReport<'a> {
    pub stats: GenerationStats,
    pub population: &'a [Individual],
    /// Offspring created this generation (the initial population at generation 0).
    pub offspring: &'a [Individual],
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// Distinct rank-0 genomes of the final population.
    pub front: Vec<Individual>,
    pub population: Vec<Individual>,
    pub history: Vec<GenerationStats>,
    pub stopped_early: bool,
}

impl EvolutionResult {
    /// Highest accuracy, then smallest SM, then lexicographically smallest genome.
    pub fn best(&self) -> &Individual {
        self.front
            .iter()
            .min_by(|a, b| compare_best(a, b))
            .expect("front is never empty")
    }
}

fn compare_best(a: &Individual, b: &Individual) -> Ordering {
    let (oa, ob) = (a.obj(), b.obj());
    ob.accuracy
        .total_cmp(&oa.accuracy)
        .then(oa.size_metric.total_cmp(&ob.size_metric))
        .then_with(|| a.genome.bits().cmp(b.genome.bits()))
}

pub fn run(config: &EvolutionConfig, train: &Dataset, test: &Dataset) -> Result<EvolutionResult> {
    run_with_observer(config, train, test, |_| {})
}

/// Runs the generational loop, calling `observer` after every selection
/// (generation 0 is the evaluated initial population).
pub fn run_with_observer<F>(
    config: &EvolutionConfig,
    train: &Dataset,
    test: &Dataset,
    mut observer: F,
) -> Result<EvolutionResult>
where
    F: FnMut(&GenerationReport<'_>),
{
    config.validate()?;
    if train.num_features() != test.num_features() {
        return Err(Error::input(
            "train and test splits differ in feature count",
        ));
    }
    if train.num_features() == 0 || train.is_empty() || test.is_empty() {
        return Err(Error::input(
            "evolution needs nonempty train and test splits with at least one feature",
        ));
    }
    let ctx = config.fitness_context(train.clone(), test.clone());
    let (m, n, d) = (config.num_qubits, config.max_layers, train.num_features());
    let mode = config.objectives;
    let cost_ref = mode.max_cost(n);
    let mut cache: HashMap<Genome, Objectives> = HashMap::new();

    let mut init_rng = substream(config.seed, "init", 0);
    let initial: Vec<Genome> = (0..config.population_mu)
        .map(|_| random_genome(m, n, d, &mut init_rng))
        .collect::<Result<_>>()?;
    let initial = evaluate_all(&ctx, initial, &mut cache);
    let mut population = select_mu(initial.clone(), config.population_mu, mode);

    let mut history = Vec::new();
    let stats = generation_stats(0, &population, cost_ref, mode);
    history.push(stats);
    observer(&GenerationReport {
        stats,
        population: &population,
        offspring: &initial,
    });

    let mut stopped_early = false;
    let mut best_target_sm = f64::INFINITY;
    let mut stale = 0usize;
    for generation in 1..=config.generations {
        let mut vary_rng = substream(config.seed, "variation", generation as u64);
        let mut tour_rng = substream(config.seed, "tournament", generation as u64);
        let children = make_offspring(&population, config, &mut vary_rng, &mut tour_rng)?;
        let offspring = evaluate_all(&ctx, children, &mut cache);

        let mut pool = population;
        pool.extend(offspring.iter().cloned());
        population = select_mu(pool, config.population_mu, mode);

        let stats = generation_stats(generation, &population, cost_ref, mode);
        history.push(stats);
        observer(&GenerationReport {
            stats,
            population: &population,
            offspring: &offspring,
        });

        if let Some(es) = &config.early_stop {
            if stats.best_accuracy >= es.target_accuracy {
                if stats.best_sm < best_target_sm {
                    best_target_sm = stats.best_sm;
                    stale = 0;
                } else {
                    stale += 1;
                }
                if stale >= es.patience {
                    stopped_early = true;
                    break;
                }
            }
        }
    }

    let mut front: Vec<Individual> = Vec::new();
    for ind in population.iter().filter(|i| i.rank == 0) {
        if !front.iter().any(|f| f.genome == ind.genome) {
            front.push(ind.clone());
        }
    }
    front.sort_by(compare_best);
    Ok(EvolutionResult {
        front,
        population,
        history,
        stopped_early,
    })
}

fn evaluate_all(
    ctx: &FitnessContext,
    genomes: Vec<Genome>,
    cache: &mut HashMap<Genome, Objectives>,
) -> Vec<Individual> {
    let mut fresh: Vec<&Genome> = Vec::new();
    for g in &genomes {
        if !cache.contains_key(g) && !fresh.contains(&g) {
            fresh.push(g);
        }
    }
    let scored: Vec<Objectives> = fresh.par_iter().map(|g| ctx.evaluate(g)).collect();
    for (g, o) in fresh.into_iter().zip(scored) {
        cache.insert(g.clone(), o);
    }
    genomes
        .into_iter()
        .map(|g| {
            let o = cache[&g];
            Individual::evaluated(g, o)
        })
        .collect()
}

fn tournament<'a, R: Rng + ?Sized>(population: &'a [Individual], rng: &mut R) -> &'a Individual {
    let a = &population[rng.random_range(0..population.len())];
    let b = &population[rng.random_range(0..population.len())];
    if b.rank < a.rank || (b.rank == a.rank && b.crowding > a.crowding) {
        b
    } else {
        a
    }
}

fn make_offspring<R1: Rng, R2: Rng>(
    population: &[Individual],
    config: &EvolutionConfig,
    vary_rng: &mut R1,
    tour_rng: &mut R2,
) -> Result<Vec<Genome>> {
    let lambda = config.offspring_lambda;
    let mut children = Vec::with_capacity(lambda + 1);
    if config.variation == Variation::Exclusive {
        while children.len() < lambda {
            let r = vary_rng.random::<f64>();
            let p1 = tournament(population, tour_rng);
            let child = if r < config.p_cross {
                let p2 = tournament(population, tour_rng);
                crossover(&p1.genome, &p2.genome, vary_rng)?.0
            } else if r < config.p_cross + config.p_mut {
                mutate(&p1.genome, config.p_ind, vary_rng)
            } else {
                p1.genome.clone()
            };
            children.push(child);
        }
        return Ok(children);
    }
    while children.len() < lambda {
        let p1 = tournament(population, tour_rng);
        let p2 = tournament(population, tour_rng);
        let (mut c1, mut c2) = if vary_rng.random::<f64>() < config.p_cross {
            crossover(&p1.genome, &p2.genome, vary_rng)?
        } else {
            (p1.genome.clone(), p2.genome.clone())
        };
        if vary_rng.random::<f64>() < config.p_mut {
            c1 = mutate(&c1, config.p_ind, vary_rng);
        }
        if vary_rng.random::<f64>() < config.p_mut {
            c2 = mutate(&c2, config.p_ind, vary_rng);
        }
        children.push(c1);
        children.push(c2);
    }
    children.truncate(lambda);
    Ok(children)
}

fn generation_stats(
    generation: usize,
    population: &[Individual],
    cost_ref: f64,
    mode: ObjectiveMode,
) -> GenerationStats {
    let best_accuracy = population
        .iter()
        .map(|i| i.obj().accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    let best_sm = population
        .iter()
        .filter(|i| i.obj().accuracy == best_accuracy)
        .map(|i| i.obj().size_metric)
        .fold(f64::INFINITY, f64::min);
    let front: Vec<(f64, f64)> = population
        .iter()
        .filter(|i| i.rank == 0)
        .map(|i| (i.obj().accuracy, i.obj().cost(mode)))
        .collect();
    GenerationStats {
        generation,
        best_accuracy,
        best_sm,
        front_size: front.len(),
        hypervolume: hypervolume(&front, cost_ref),
    }
}
