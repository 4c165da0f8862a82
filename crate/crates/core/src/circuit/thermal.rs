/// Linear temperature profile across stacked tiers, bottom (tier 0) to top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierThermalModel {
    pub n_tiers: usize,
    /// K
    pub t_bottom: f64,
    /// Top minus bottom, K.
    pub delta_t_total: f64,
}

impl Default for TierThermalModel {
    fn default() -> Self {
        TierThermalModel {
            n_tiers: 3,
            t_bottom: 298.15,
            delta_t_total: 75.0,
        }
    }
}

impl TierThermalModel {
    /// Temperature of `tier`, K. Tiers past the top clamp to the top.
    pub fn tier_temperature(&self, tier: usize) -> f64 {
        if self.n_tiers <= 1 || tier == 0 {
            return self.t_bottom;
        }
        let top = self.n_tiers - 1;
        if tier >= top {
            return self.t_bottom + self.delta_t_total;
        }
        self.t_bottom + self.delta_t_total * tier as f64 / top as f64
    }

    pub fn top(&self) -> usize {
        self.n_tiers.saturating_sub(1)
    }
}

/// Fixed array dimensions of the stacked tile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileGeometry {
    pub tiers: usize,
    pub banks_total: usize,
    /// bits per bank
    pub bank_capacity: u64,
    pub bitline_cells: usize,
    pub wordline_cells: usize,
    /// in units of F²
    pub cell_area_f2: f64,
    /// m
    pub feature_size: f64,
    /// mm²
    pub tile_area_mm2: f64,
    /// `(min, max)`; no computational role.
    pub replication_factor: (u32, u32),
    /// `(min, max)` TSV hops per decision.
    pub tsv_hops: (usize, usize),
}

impl Default for TileGeometry {
    fn default() -> Self {
        TileGeometry {
            tiers: 3,
            banks_total: 32,
            bank_capacity: 8 * 1024 * 1024,
            bitline_cells: 256,
            wordline_cells: 2048,
            cell_area_f2: 80.0,
            feature_size: 45e-9,
            tile_area_mm2: 15.94,
            replication_factor: (2, 3),
            tsv_hops: (1, 3),
        }
    }
}

impl TileGeometry {
    /// Cell footprint, m².
    pub fn cell_area(&self) -> f64 {
        self.cell_area_f2 * self.feature_size * self.feature_size
    }
}
