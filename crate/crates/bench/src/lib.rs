//! Shared fixtures for the benchmarks.

use oemarkov::catalog::{m1, m2, random_periodic_spec};
use oemarkov::edgeslide::SlideParams;
use oemarkov::MarkovSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named specs the engines are timed on.
pub fn specs() -> Vec<(&'static str, MarkovSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    vec![("m1", m1()), ("m2", m2()), ("periodic4", random_periodic_spec(&mut rng, 4))]
}

/// M2 slid along s1 onto s2 with E = {(0, 1)}.
pub fn m2_slide() -> (MarkovSpec, SlideParams) {
    let spec = m2();
    let params = SlideParams::new(&spec, 0, 1, vec![(0, 1)]).expect("special edge set");
    (spec, params)
}
