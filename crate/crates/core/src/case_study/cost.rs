//! Hardware cost model: USD to sustain one TH/s for a whole day.

use super::RigSpec;

/// Cost of producing one TH/s for one day on `rig` at the given electricity
/// price: amortized hardware plus energy,
/// `P / (365 L H) + (W/1000) * kwh * 24 / H`.
pub fn unit_cost(rig: &RigSpec, usd_per_kwh: f64) -> f64 {
    let amortization = rig.price / (365.0 * rig.lifespan * rig.hashrate);
    let energy = (rig.power / 1000.0) * usd_per_kwh * 24.0 / rig.hashrate;
    amortization + energy
}
