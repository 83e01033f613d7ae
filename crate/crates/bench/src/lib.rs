//! Shared fixtures for the pipeline benchmarks.

use bosonlink_core::purify::RawSource;
use bosonlink_core::sweep::{pumping_source, raw_point, RawPoint, Registers};
use bosonlink_core::{Result, ScenarioConfig, Scheme};

/// Default scenario at its configured pump power and release probability.
pub fn default_point() -> Result<(ScenarioConfig, RawPoint)> {
    let cfg = ScenarioConfig::default();
    let point = raw_point(
        &cfg,
        Scheme::Conversion,
        cfg.p_e,
        cfg.p_laser_uw,
        &cfg.link,
        &Registers::Ideal,
    )?;
    Ok((cfg, point))
}

/// Raw pair feeding the pumping benchmarks, at a power where the stored
/// pair survives the wait.
pub fn pumping_fixture(p_laser_uw: f64) -> Result<(ScenarioConfig, RawSource)> {
    let cfg = ScenarioConfig {
        p_e: 0.15,
        ..ScenarioConfig::default()
    };
    let (_, source) = pumping_source(&cfg, p_laser_uw)?;
    Ok((cfg, source))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let (_, point) = default_point().unwrap();
        assert!(point.p_success > 0.0);
        let (_, source) = pumping_fixture(100.0).unwrap();
        assert_eq!(source.rho.space().dims(), [2, 2]);
    }
}
