//! Unipolar stochastic computing on generated streams.
//!
//! A value `v ∈ [0, 1]` is carried as the mean of a bit stream. For
//! independent streams, bitwise AND multiplies, OR computes `a + b - ab`,
//! and a 2:1 multiplexer driven by a select stream of mean `s` computes the
//! scaled sum `s·a + (1 - s)·b`. Correlated inputs break all three.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::physics::DeviceParams;
use crate::sampling::{generate_stream, BitStream, TimingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScEncoding {
    Unipolar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticNumber {
    pub stream: BitStream,
    /// Value the stream is meant to carry.
    pub nominal_value: f64,
    pub encoding: ScEncoding,
    /// Generator seeds of every encoded stream this number was computed from.
    pub lineage: Vec<u64>,
    /// Set when an operation combined operands that share a seed.
    pub correlated_inputs: bool,
}

impl StochasticNumber {
    /// Wraps existing bits; the nominal value is their mean.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let stream = BitStream::from_bits(bits);
        Self {
            nominal_value: stream.mean(),
            stream,
            encoding: ScEncoding::Unipolar,
            lineage: Vec::new(),
            correlated_inputs: false,
        }
    }

    /// Constant stream of `n` copies of `bit` (exact 0 or 1).
    pub fn constant(bit: bool, n: usize) -> Self {
        Self::from_bits(vec![bit; n])
    }

    pub fn len(&self) -> usize {
        self.stream.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stream.is_empty()
    }
}

/// Programs the device to mean `value` and draws `n` ideal measure-relax
/// cycles with `seed`.
pub fn encode(value: f64, n: usize, device: &DeviceParams, seed: u64) -> Result<StochasticNumber> {
    let detuning = device.programmed_detuning(value)?;
    let timing = TimingConfig::relaxed_for(device, n);
    let stream = generate_stream(device, detuning, &timing, seed, true)?;
    Ok(StochasticNumber {
        stream,
        nominal_value: value,
        encoding: ScEncoding::Unipolar,
        lineage: vec![seed],
        correlated_inputs: false,
    })
}

/// Fraction of ones.
pub fn decode(sn: &StochasticNumber) -> Result<f64> {
    if sn.is_empty() {
        return Err(Error::Domain("cannot decode an empty stream".into()));
    }
    Ok(sn.stream.mean())
}

/// True when two operands were built from a common generator seed.
pub fn correlation_hazard(a: &StochasticNumber, b: &StochasticNumber) -> bool {
    a.lineage.iter().any(|s| b.lineage.contains(s))
}

fn check_lengths(a: &StochasticNumber, b: &StochasticNumber) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

fn combine(
    operands: &[&StochasticNumber],
    bits: Vec<bool>,
    nominal_value: f64,
    op: &str,
) -> StochasticNumber {
    let correlated = operands
        .iter()
        .enumerate()
        .any(|(i, a)| operands[i + 1..].iter().any(|b| correlation_hazard(a, b)));
    if correlated {
        log::warn!("{op}: operands share a generator seed; the result is biased by correlation");
    }
    let mut lineage: Vec<u64> = operands.iter().flat_map(|o| o.lineage.iter().copied()).collect();
    lineage.sort_unstable();
    lineage.dedup();
    StochasticNumber {
        stream: BitStream::from_bits(bits),
        nominal_value,
        encoding: ScEncoding::Unipolar,
        lineage,
        correlated_inputs: correlated || operands.iter().any(|o| o.correlated_inputs),
    }
}

/// Bitwise AND; nominal `a·b`.
pub fn sc_multiply(a: &StochasticNumber, b: &StochasticNumber) -> Result<StochasticNumber> {
    check_lengths(a, b)?;
    let bits = a.stream.bits.iter().zip(&b.stream.bits).map(|(&x, &y)| x && y).collect();
    Ok(combine(&[a, b], bits, a.nominal_value * b.nominal_value, "multiply"))
}

/// Bitwise OR; nominal `a + b - a·b`.
pub fn sc_or(a: &StochasticNumber, b: &StochasticNumber) -> Result<StochasticNumber> {
    check_lengths(a, b)?;
    let bits = a.stream.bits.iter().zip(&b.stream.bits).map(|(&x, &y)| x || y).collect();
    let (x, y) = (a.nominal_value, b.nominal_value);
    Ok(combine(&[a, b], bits, x + y - x * y, "or"))
}

/// Multiplexer: bit `i` is `a_i` where `select_i` is set, else `b_i`.
pub fn sc_scaled_add(
    a: &StochasticNumber,
    b: &StochasticNumber,
    select: &StochasticNumber,
) -> Result<StochasticNumber> {
    check_lengths(a, b)?;
    check_lengths(a, select)?;
    let bits = select
        .stream
        .bits
        .iter()
        .zip(a.stream.bits.iter().zip(&b.stream.bits))
        .map(|(&s, (&x, &y))| if s { x } else { y })
        .collect();
    let s = select.nominal_value;
    let nominal = s * a.nominal_value + (1.0 - s) * b.nominal_value;
    Ok(combine(&[a, b, select], bits, nominal, "scaled_add"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::DeviceParams;

    fn device() -> DeviceParams {
        DeviceParams::new(50e-3, 1e-12).unwrap()
    }

    #[test]
    fn encode_half_uses_zero_detuning() {
        let sn = encode(0.5, 64, &device(), 1).unwrap();
        assert_eq!(sn.stream.origin.unwrap().detuning, 0.0);
        assert_eq!(sn.nominal_value, 0.5);
        assert_eq!(sn.len(), 64);
    }

    #[test]
    fn encode_rejects_endpoints() {
        assert_eq!(encode(0.0, 8, &device(), 0).unwrap_err(), Error::UnreachableBias(0.0));
        assert_eq!(encode(1.0, 8, &device(), 0).unwrap_err(), Error::UnreachableBias(1.0));
    }

    #[test]
    fn encode_in_thermal_mode_programs_thermal_mean() {
        let dev = DeviceParams::new(0.5e-3, 1e-9).unwrap().thermal(1e-5).unwrap();
        let sn = encode(0.3, 200_000, &dev, 4).unwrap();
        let sigma = (0.3f64 * 0.7 / 200_000.0).sqrt();
        assert!((decode(&sn).unwrap() - 0.3).abs() < 4.0 * sigma);
    }

    #[test]
    fn decode_constants() {
        assert_eq!(decode(&StochasticNumber::constant(true, 10)).unwrap(), 1.0);
        assert_eq!(decode(&StochasticNumber::constant(false, 10)).unwrap(), 0.0);
        assert!(matches!(decode(&StochasticNumber::constant(false, 0)), Err(Error::Domain(_))));
    }

    #[test]
    fn and_identity_and_annihilator() {
        let b = encode(0.37, 1000, &device(), 9).unwrap();
        let one = StochasticNumber::constant(true, 1000);
        let zero = StochasticNumber::constant(false, 1000);
        assert_eq!(sc_multiply(&one, &b).unwrap().stream.bits, b.stream.bits);
        assert_eq!(decode(&sc_multiply(&zero, &b).unwrap()).unwrap(), 0.0);
        assert_eq!(sc_or(&zero, &b).unwrap().stream.bits, b.stream.bits);
        assert_eq!(decode(&sc_or(&one, &b).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn mux_select_constants() {
        let a = encode(0.8, 500, &device(), 1).unwrap();
        let b = encode(0.2, 500, &device(), 2).unwrap();
        let all = StochasticNumber::constant(true, 500);
        let none = StochasticNumber::constant(false, 500);
        assert_eq!(sc_scaled_add(&a, &b, &all).unwrap().stream.bits, a.stream.bits);
        assert_eq!(sc_scaled_add(&a, &b, &none).unwrap().stream.bits, b.stream.bits);
    }

    #[test]
    fn shape_mismatch() {
        let a = StochasticNumber::constant(true, 10);
        let b = StochasticNumber::constant(true, 11);
        assert_eq!(sc_multiply(&a, &b).unwrap_err(), Error::Shape { left: 10, right: 11 });
        assert!(matches!(sc_or(&a, &b), Err(Error::Shape { .. })));
        assert!(matches!(sc_scaled_add(&a, &a, &b), Err(Error::Shape { .. })));
    }

    #[test]
    fn shared_seed_is_flagged() {
        let a = encode(0.5, 100, &device(), 3).unwrap();
        let b = encode(0.4, 100, &device(), 3).unwrap();
        let c = encode(0.4, 100, &device(), 4).unwrap();
        assert!(sc_multiply(&a, &b).unwrap().correlated_inputs);
        let ok = sc_multiply(&a, &c).unwrap();
        assert!(!ok.correlated_inputs);
        assert_eq!(ok.lineage, vec![3, 4]);
        // The flag propagates downstream.
        let bad = sc_multiply(&a, &b).unwrap();
        let d = encode(0.5, 100, &device(), 5).unwrap();
        assert!(sc_multiply(&bad, &d).unwrap().correlated_inputs);
    }

    #[test]
    fn nominal_values() {
        let a = encode(0.6, 10, &device(), 1).unwrap();
        let b = encode(0.3, 10, &device(), 2).unwrap();
        let s = encode(0.25, 10, &device(), 3).unwrap();
        assert!((sc_multiply(&a, &b).unwrap().nominal_value - 0.18).abs() < 1e-15);
        assert!((sc_or(&a, &b).unwrap().nominal_value - 0.72).abs() < 1e-15);
        assert!((sc_scaled_add(&a, &b, &s).unwrap().nominal_value - 0.375).abs() < 1e-15);
    }

    #[test]
    fn operations_preserve_length_and_are_deterministic() {
        let a = encode(0.6, 333, &device(), 1).unwrap();
        let b = encode(0.3, 333, &device(), 2).unwrap();
        let s = encode(0.5, 333, &device(), 3).unwrap();
        assert_eq!(sc_multiply(&a, &b).unwrap().len(), 333);
        assert_eq!(sc_or(&a, &b).unwrap().len(), 333);
        assert_eq!(sc_scaled_add(&a, &b, &s).unwrap().len(), 333);
        assert_eq!(sc_scaled_add(&a, &b, &s).unwrap(), sc_scaled_add(&a, &b, &s).unwrap());
    }
}
