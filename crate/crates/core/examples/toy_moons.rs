//! Evolves a feature map on the two-moons toy problem and prints progress.
//!
//! `cargo run --release --example toy_moons -- [seed] [generations] [C] [data seed] [variation] [objectives] [patience]`
//!
//! Stops `patience` generations (default 200) after the best size at accuracy 1.0 last improved.

use qfm_core::data::{apply_scale, fit_scale, make_moons, split};
use qfm_core::evolve::{run_with_observer, EarlyStop, EvolutionConfig};
use qfm_core::genome::count_gates;
use qfm_core::seed::derive_seed;
use qfm_core::{decode_genome, SvmParams};

fn main() -> qfm_core::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seed: u64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0);
    let generations: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let c: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let data_seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(seed);
    let variation = args.get(4).map_or(Ok(Default::default()), |s| s.parse())?;
    let objectives = args.get(5).map_or(Ok(Default::default()), |s| s.parse())?;
    let patience: usize = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(200);

    let data = make_moons(150, 0.2, derive_seed(data_seed, "data", 0))?;
    let parts = split(&data, 0.7, derive_seed(data_seed, "split", 0))?;
    let scaler = fit_scale(&parts.train)?;
    let train = apply_scale(&scaler, &parts.train)?;
    let test = apply_scale(&scaler, &parts.test)?;

    let config = EvolutionConfig {
        generations,
        seed,
        variation,
        objectives,
        svm: SvmParams {
            c,
            ..SvmParams::default()
        },
        early_stop: Some(EarlyStop {
            target_accuracy: 1.0,
            patience,
        }),
        ..EvolutionConfig::default()
    };
    let start = std::time::Instant::now();
    let result = run_with_observer(&config, &train, &test, |r| {
        let s = r.stats;
        if s.generation % 50 == 0 {
            let distinct: std::collections::HashSet<_> =
                r.population.iter().map(|i| i.genome.clone()).collect();
            let best = r
                .population
                .iter()
                .filter(|i| i.objectives.unwrap().accuracy == s.best_accuracy)
                .min_by(|a, b| {
                    let (a, b) = (a.objectives.unwrap(), b.objectives.unwrap());
                    a.size_metric.total_cmp(&b.size_metric)
                })
                .unwrap();
            let cnot = count_gates(&decode_genome(&best.genome)).cnot;
            println!(
                "gen {:5} acc {:.4} sm {:.3} cnot {} front {:3} distinct {:3} hv {:.3} ({:.1}s)",
                s.generation,
                s.best_accuracy,
                s.best_sm,
                cnot,
                s.front_size,
                distinct.len(),
                s.hypervolume,
                start.elapsed().as_secs_f64()
            );
        }
    })?;
    let best = result.best();
    let circuit = decode_genome(&best.genome);
    println!(
        "best after {} generations: {:?} cnot {} stopped early {}",
        result.history.len() - 1,
        best.objectives.unwrap(),
        count_gates(&circuit).cnot,
        result.stopped_early
    );
    println!("{}", best.genome);
    Ok(())
}
