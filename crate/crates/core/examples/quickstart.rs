use cneigh::infer::subsample_pi;
use cneigh::rng::{stream, Role};
use cneigh::{DesignSample, Domain, IntegrandEvaluations, Rule, SamplingMeasure, SubsampleConfig, WeightOptions};

fn main() -> cneigh::Result<()> {
    // three points, φ(t) = t
    let s = DesignSample::uniform_interval(vec![0.1, 0.5, 0.9])?;
    let ev = IntegrandEvaluations::new(s, vec![0.1, 0.5, 0.9])?;
    let est = Rule::ControlUnbiased.estimate(&ev, &WeightOptions::default())?;
    assert!((est - 19.0 / 30.0).abs() < 1e-12);

    // 95% prediction interval for a Hölder-½ integrand
    let mut rng = stream(7, 0, Role::Design, 0);
    let s = DesignSample::draw(Domain::cube(1)?, SamplingMeasure::Uniform, 500, &mut rng)?;
    let ev = IntegrandEvaluations::from_fn(s, |t| (t[0] - 0.5).abs().sqrt())?;
    let cfg = SubsampleConfig::new(0.5, 7).with_replicates(500);
    let pi = subsample_pi(&ev, Rule::ControlUnbiased, &cfg, 0.05, &WeightOptions::default())?;
    println!("{} in [{}, {}]", pi.point, pi.lower, pi.upper);
    Ok(())
}
