use rabi_core::model::{Branch, ModelParams};
use rabi_core::spectrum::{
    find_splitting_point, fit_inverse_sqrt, lambda_c_pusc, lambda_c_rwa, InverseSqrtFit, SplittingOptions,
};

use crate::error::{config, Result};
use crate::sweep::Runner;

#[derive(Debug, Clone, PartialEq)]
pub struct SplittingRow {
    pub n: usize,
    pub branch: Branch,
    pub delta: f64,
    /// `None` when the point could not be located; see `error`.
    pub lambda_s: Option<f64>,
    pub lambda_c_rwa: f64,
    pub lambda_c_pusc: f64,
    pub min_overlap: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SplittingScan {
    pub delta: f64,
    pub rows: Vec<SplittingRow>,
    /// `c / sqrt(n)` fit of the minus branch over every located point.
    pub fit_minus: Option<InverseSqrtFit>,
    /// `c / sqrt(n + 1)` fit of the plus branch over every located point.
    pub fit_plus: Option<InverseSqrtFit>,
    /// The same fits restricted to `n >= fit_from`, for the free exponent.
    pub fit_from: usize,
    pub tail_fit_minus: Option<InverseSqrtFit>,
    pub tail_fit_plus: Option<InverseSqrtFit>,
}

impl SplittingScan {
    pub fn points(&self, branch: Branch) -> Vec<(usize, f64)> {
        self.rows.iter().filter(|r| r.branch == branch).filter_map(|r| r.lambda_s.map(|l| (r.n, l))).collect()
    }

    pub fn fit_coefficient(&self, branch: Branch) -> Option<f64> {
        match branch {
            Branch::Minus => self.fit_minus.map(|f| f.coefficient),
            Branch::Plus => self.fit_plus.map(|f| f.coefficient),
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &SplittingRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

/// Fit offset paired with each branch: `1/sqrt(n)` for minus, `1/sqrt(n+1)`
/// for plus.
pub fn branch_offset(branch: Branch) -> u32 {
    match branch {
        Branch::Minus => 0,
        Branch::Plus => 1,
    }
}

/// Splitting points of both branches for `n = 1..=n_max_level` with their
/// inverse-square-root fits. Levels that cannot be tracked are recorded and
/// left out of the fits.
pub fn splitting_scan(n_max_level: usize, delta: f64, fit_from: usize, runner: &Runner) -> Result<SplittingScan> {
    if n_max_level < 10 {
        return Err(config("splitting scan needs at least 10 levels"));
    }
    if fit_from == 0 || fit_from + 4 > n_max_level {
        return Err(config("tail fit needs 1 <= fit_from and at least 5 levels"));
    }
    let params = ModelParams::resonant(0.0)?;
    let cells: Vec<(usize, Branch)> = (1..=n_max_level).flat_map(|n| [(n, Branch::Minus), (n, Branch::Plus)]).collect();
    let opts = SplittingOptions::default();
    let rows = runner.map("splitting", &cells, |&(n, branch)| {
        let point = find_splitting_point(n, branch, delta, &params, &opts);
        SplittingRow {
            n,
            branch,
            delta,
            lambda_s: point.as_ref().ok().map(|p| p.lambda_s),
            lambda_c_rwa: lambda_c_rwa(n, params.omega0),
            lambda_c_pusc: lambda_c_pusc(n, params.omega0),
            min_overlap: point.as_ref().ok().map(|p| p.min_overlap),
            error: point.err().map(|e| e.to_string()),
        }
    })?;
    let mut scan = SplittingScan {
        delta,
        rows,
        fit_minus: None,
        fit_plus: None,
        fit_from,
        tail_fit_minus: None,
        tail_fit_plus: None,
    };
    let fit = |branch: Branch, from: usize| {
        let pts: Vec<(f64, f64)> =
            scan.points(branch).into_iter().filter(|&(n, _)| n >= from).map(|(n, l)| (n as f64, l)).collect();
        fit_inverse_sqrt(&pts, branch_offset(branch)).ok()
    };
    let (fm, fp) = (fit(Branch::Minus, 1), fit(Branch::Plus, 1));
    let (tm, tp) = (fit(Branch::Minus, fit_from), fit(Branch::Plus, fit_from));
    scan.fit_minus = fm;
    scan.fit_plus = fp;
    scan.tail_fit_minus = tm;
    scan.tail_fit_plus = tp;
    Ok(scan)
}
