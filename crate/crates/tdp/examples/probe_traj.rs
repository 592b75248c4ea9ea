use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdp::algspec::{parse_spec, AlgorithmSpec};
use tdp::evolution::{EvoParams, SteadyStateGa};
use tdp::instance::builtin_instance;
use tdp::localsearch::{HillClimber, SearchBudget};
use tdp::encoding::random_genotype;
use tdp::pressing::Evaluator;

fn main() {
    let inst = builtin_instance("catfood").unwrap();
    let spec = match parse_spec("Ga.P.A4.Ux").unwrap() {
        AlgorithmSpec::Genetic(g) => g,
        _ => unreachable!(),
    };
    for seed in [1u64, 2, 3] {
        let params = EvoParams::for_genetic(&inst, &spec, 4200);
        let mut ev = Evaluator::new(&inst, 4200);
        let mut engine = SteadyStateGa::new(&inst, spec.kind, params, ChaCha8Rng::seed_from_u64(seed));
        print!("GA seed {seed}: ");
        for _ in 0..6 {
            engine.advance(&mut ev, 700);
            if let Some((_, f)) = engine.best() {
                print!("({},{}) ", f.violation, f.waste);
            }
        }
        println!();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = random_genotype(&inst, spec.kind, &mut rng);
        let mut ev = Evaluator::new(&inst, 4200);
        let mut hc = HillClimber::new(&inst, spec.kind, start, SearchBudget::new(4200), rng);
        print!("HC seed {seed}: ");
        for _ in 0..6 {
            hc.advance(&mut ev, 700);
            if let Some((_, f)) = hc.best() {
                print!("({},{}) ", f.violation, f.waste);
            }
        }
        println!();
    }
}
