use super::{estimates, measure, net, weights};
use crate::error::Result;
use crate::fixtures::{
    lower, upper, window, EstimateFixtures, Fixtures, MeasureFixtures, NetFixtures, WeightFixtures, FORMAT_VERSION,
};

/// Runs every observer with `seed` and widens the raw extremes by the margin.
pub fn calibrate(seed: u64) -> Result<Fixtures> {
    let n = net::observe_fixtures(seed, net::NetScale::FULL)?;
    log::info!("calibrated net");
    let m = measure::observe_fixtures(seed)?;
    log::info!("calibrated measure");
    let w = weights::observe_fixtures(seed)?;
    log::info!("calibrated weights");
    let e = estimates::observe_fixtures(seed)?;
    log::info!("calibrated estimates");
    let win = |w: [f64; 2]| window(w[0], w[1]);
    Ok(Fixtures {
        version: FORMAT_VERSION,
        calibration_seed: seed,
        net: NetFixtures {
            cardinality: win(n.cardinality),
            // A list length is an integer; the margin still applies.
            separated_pairs: upper(n.separated_pairs),
            overlap: upper(n.overlap),
            sector: upper(n.sector),
        },
        measure: MeasureFixtures {
            sphere_sphere: upper(m.sphere_sphere),
            cone_cone: upper(m.cone_cone),
            cone_ball: upper(m.cone_ball),
            quadric: upper(m.quadric),
        },
        weights: WeightFixtures { lower: lower(w.lower), output: win(w.output) },
        estimates: EstimateFixtures {
            bilinear_input: upper(e.bilinear_input),
            bilinear_output: upper(e.bilinear_output),
            bilinear_symmetric: upper(e.bilinear_symmetric),
            low_output_tube: upper(e.low_output_tube),
            tube_norm: win(e.tube_norm),
            null_caps: win(e.null_caps),
            null_form_tube: win(e.null_form_tube),
            null_form_ball: win(e.null_form_ball),
        },
    })
}
