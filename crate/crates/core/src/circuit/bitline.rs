use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Distributed RC ladder from the precharge/sense end to the selected cell.
///
/// Nodes run from 0 (sense amplifier and precharge driver) to
/// `n_segments` (the selected cell). Each segment is a π section: its
/// resistance between neighbouring nodes and half its wire capacitance on
/// either end. The cell load sits on the last node, TSVs on interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BitlineNetwork {
    pub n_segments: usize,
    /// Ω
    pub r_segment: f64,
    /// Wire capacitance per segment, F.
    pub c_segment: f64,
    /// F per TSV.
    pub c_tsv: f64,
    /// Node indices carrying one TSV each. May repeat when hops are dense.
    pub tsv_nodes: Vec<usize>,
    /// Cell load on the device node, F.
    pub c_bit: f64,
}

/// Split `r_bl` evenly over `n_segments`, put `c_bit` on the device node
/// and hang `tsv_hops` TSV capacitors on evenly spaced interior nodes. The
/// wire itself carries no capacitance until [`BitlineNetwork::with_wire`].
pub fn build_bitline(
    r_bl: f64,
    c_bit: f64,
    c_tsv: f64,
    n_segments: usize,
    tsv_hops: usize,
) -> Result<BitlineNetwork> {
    if n_segments == 0 {
        return Err(Error::InvalidGeometry(
            "a bitline needs at least one segment",
        ));
    }
    if tsv_hops > n_segments {
        return Err(Error::InvalidGeometry("more TSV hops than segments"));
    }
    for v in [r_bl, c_bit, c_tsv] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidGeometry(
                "resistances and capacitances must be finite and >= 0",
            ));
        }
    }
    let n = n_segments;
    let tsv_nodes = (1..=tsv_hops)
        .map(|k| {
            let pos = libm::round((k * n) as f64 / (tsv_hops + 1) as f64) as usize;
            pos.clamp(1, n)
        })
        .collect();
    Ok(BitlineNetwork {
        n_segments: n,
        r_segment: r_bl / n as f64,
        c_segment: 0.0,
        c_tsv,
        tsv_nodes,
        c_bit,
    })
}

impl BitlineNetwork {
    /// Copy with `c_wire` of interconnect capacitance spread along the line.
    pub fn with_wire(&self, c_wire: f64) -> Result<Self> {
        if !(c_wire >= 0.0 && c_wire.is_finite()) {
            return Err(Error::InvalidGeometry(
                "wire capacitance must be finite and >= 0",
            ));
        }
        let mut n = self.clone();
        n.c_segment = c_wire / self.n_segments as f64;
        Ok(n)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_segments + 1
    }

    pub fn device_node(&self) -> usize {
        self.n_segments
    }

    pub fn r_total(&self) -> f64 {
        self.r_segment * self.n_segments as f64
    }

    /// Capacitance to ground at every node, F.
    pub fn node_capacitances(&self) -> Vec<f64> {
        let n = self.n_segments;
        let mut c = alloc::vec![self.c_segment; n + 1];
        c[0] = 0.5 * self.c_segment;
        c[n] = 0.5 * self.c_segment + self.c_bit;
        for &i in &self.tsv_nodes {
            c[i] += self.c_tsv;
        }
        c
    }

    pub fn c_total(&self) -> f64 {
        self.c_segment * self.n_segments as f64
            + self.c_bit
            + self.c_tsv * self.tsv_nodes.len() as f64
    }

    /// Copy with every segment resistance multiplied by `factor`.
    pub fn with_resistance_scale(&self, factor: f64) -> Self {
        let mut n = self.clone();
        n.r_segment *= factor;
        n
    }

    /// Elmore delay at `node` when driven through `r_source`:
    /// `Σ_k R_k · C_downstream(k)` over the resistors on the path.
    pub fn elmore_delay(&self, r_source: f64, node: usize) -> f64 {
        let c = self.node_capacitances();
        let mut delay = r_source * c.iter().sum::<f64>();
        for k in 1..=node.min(self.n_segments) {
            // segment k feeds every node from k on
            let downstream: f64 = c[k..].iter().sum();
            delay += self.r_segment * downstream;
        }
        delay
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_segment_is_lumped() {
        let n = build_bitline(1000.0, 1e-15, 0.0, 1, 0).unwrap();
        assert_eq!(n.node_capacitances(), [0.0, 1e-15]);
        assert_eq!(n.r_segment, 1000.0);
        assert!(n.tsv_nodes.is_empty());
    }

    #[test]
    fn even_split() {
        let n = build_bitline(200.0, 16e-15, 0.0, 8, 0).unwrap();
        assert_eq!(n.r_segment, 25.0);
        assert!((n.r_total() - 200.0).abs() <= 1e-12 * 200.0);
    }

    #[test]
    fn worst_case_corner_places_three_tsvs() {
        let n = build_bitline(300.0, 30e-15, 20e-15, 16, 3).unwrap();
        assert_eq!(n.tsv_nodes, [4, 8, 12]);
        assert!((n.c_total() - 90e-15).abs() < 1e-27);
    }

    #[test]
    fn wire_capacitance_is_split_into_pi_sections() {
        let n = build_bitline(100.0, 2e-15, 0.0, 4, 0)
            .unwrap()
            .with_wire(8e-15)
            .unwrap();
        let expected = [1e-15, 2e-15, 2e-15, 2e-15, 3e-15];
        for (c, e) in n.node_capacitances().iter().zip(expected) {
            assert!((c - e).abs() < 1e-27);
        }
        assert!((n.c_total() - 10e-15).abs() < 1e-27);
    }

    #[test]
    fn nonsense_counts_rejected() {
        assert_eq!(
            build_bitline(1.0, 1.0, 1.0, 0, 0).unwrap_err().name(),
            "InvalidGeometry"
        );
        assert!(build_bitline(1.0, 1.0, 1.0, 2, 3).is_err());
        assert!(build_bitline(-1.0, 1.0, 1.0, 2, 0).is_err());
    }

    #[test]
    fn resistance_sum_survives_awkward_splits() {
        for n in 1..40 {
            let net = build_bitline(300.0, 1e-15, 0.0, n, 0).unwrap();
            let sum: f64 = (0..n).map(|_| net.r_segment).sum();
            assert!((sum - 300.0).abs() <= 1e-12 * 300.0, "n = {n}");
        }
    }
}
