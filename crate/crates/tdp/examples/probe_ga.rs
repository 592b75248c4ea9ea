use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdp::algspec::{Crossover, parse_spec, AlgorithmSpec};
use tdp::evolution::{EvoParams, SteadyStateGa};
use tdp::instance::builtin_instance;
use tdp::pressing::Evaluator;

fn main() {
    let inst = builtin_instance("catfood").unwrap();
    let spec = match parse_spec("Ga.P.A4.Gd").unwrap() {
        AlgorithmSpec::Genetic(g) => g,
        _ => unreachable!(),
    };
    let budget = 4200u64;
    let variants: Vec<(&str, Box<dyn Fn(&mut EvoParams)>)> = vec![
        ("baseline", Box::new(|_p: &mut EvoParams| {})),
        ("no-restart", Box::new(|p: &mut EvoParams| { p.ls_cap = 0; /* marker */ })),
        ("popsize-50", Box::new(|p: &mut EvoParams| p.popsize = 50)),
        ("popsize-30", Box::new(|p: &mut EvoParams| p.popsize = 30)),
        ("pm-x3", Box::new(|p: &mut EvoParams| p.p_m *= 3.0)),
        ("ux", Box::new(|p: &mut EvoParams| p.crossover = Crossover::Uniform)),
        ("popsize30+pmx3", Box::new(|p: &mut EvoParams| { p.popsize = 30; p.p_m *= 3.0 })),
    ];
    for (name, tweak) in &variants {
        let mut feas = 0;
        for seed in 1..=20u64 {
            let mut params = EvoParams::for_genetic(&inst, &spec, budget);
            tweak(&mut params);
            let mut ev = Evaluator::new(&inst, budget);
            let mut engine = SteadyStateGa::new(&inst, spec.kind, params, ChaCha8Rng::seed_from_u64(seed));
            engine.advance(&mut ev, budget);
            if let Some((_, f)) = engine.best() {
                if f.violation == 0 { feas += 1; }
            }
        }
        println!("{name}: {feas}/20");
    }
}
