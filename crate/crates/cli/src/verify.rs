//! Self-verification: exhaustive mapping checks plus randomized
//! sparse-vs-dense equivalence trials. This is the same evidence the test
//! suite relies on, packaged so a user can run it against their own build.

use csrpoly_core::{
    expand, expand_dense, expanded_dim, forward_map, invert_map, tuples, CsrMatrix,
    Error as CoreError, ExpansionSpec, FeatureTuple, MappingKind,
};

/// Counts from one [`run_verify`] call. `failures` holds descriptions of
/// the first failed checks (capped) for diagnostics.
#[derive(Debug, Default)]
pub struct VerifyReport {
    pub mapping_checks: u64,
    pub mapping_failures: u64,
    pub oracle_checks: u64,
    pub oracle_failures: u64,
    pub failures: Vec<String>,
}

const MAX_FAILURE_DETAILS: usize = 16;

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mapping_failures == 0 && self.oracle_failures == 0
    }

    fn fail(&mut self, mapping: bool, message: String) {
        if mapping {
            self.mapping_failures += 1;
        } else {
            self.oracle_failures += 1;
        }
        if self.failures.len() < MAX_FAILURE_DETAILS {
            self.failures.push(message);
        }
    }
}

/// Exhaustively checks, for every kind and every width up to `max_dim`,
/// that the forward maps enumerate `0..expanded_dim` in tuple order and
/// that `invert_map` round-trips; then runs `trials` randomized
/// sparse-vs-dense-oracle equivalence checks seeded from `seed`.
pub fn run_verify(max_dim: usize, trials: usize, seed: u64) -> Result<VerifyReport, CoreError> {
    if max_dim < 2 {
        return Err(CoreError::Argument(format!(
            "max_dim must be at least 2, got {max_dim}"
        )));
    }
    let mut report = VerifyReport::default();
    for d in 0..=max_dim {
        for kind in MappingKind::ALL {
            check_mapping(d, kind, &forward_map, &mut report);
        }
    }
    for trial in 0..trials {
        oracle_trial(seed, trial as u64, &mut report);
    }
    Ok(report)
}

/// Mapping checks against an injectable forward map, so the failure path
/// itself is testable with a corrupted map.
fn check_mapping<F>(d: usize, kind: MappingKind, forward: &F, report: &mut VerifyReport)
where
    F: Fn(FeatureTuple, usize, MappingKind) -> Result<usize, CoreError>,
{
    let dim = match expanded_dim(d, kind) {
        Ok(dim) => dim,
        Err(e) => {
            report.mapping_checks += 1;
            report.fail(true, format!("{kind} d={d}: expanded_dim failed: {e}"));
            return;
        }
    };
    let mut count = 0usize;
    for (q, t) in tuples(d, kind).enumerate() {
        report.mapping_checks += 1;
        count += 1;
        match forward(t, d, kind) {
            Ok(col) if col == q => {}
            Ok(col) => report.fail(
                true,
                format!("{kind} d={d}: tuple ({t}) mapped to column {col}, expected {q}"),
            ),
            Err(e) => report.fail(true, format!("{kind} d={d}: tuple ({t}) failed: {e}")),
        }
    }
    report.mapping_checks += 1;
    if count != dim {
        report.fail(
            true,
            format!("{kind} d={d}: enumerated {count} tuples, expanded_dim says {dim}"),
        );
    }
    for q in 0..dim {
        report.mapping_checks += 1;
        match invert_map(q, d, kind) {
            Ok(t) => match forward(t, d, kind) {
                Ok(col) if col == q => {}
                other => report.fail(
                    true,
                    format!(
                        "{kind} d={d}: column {q} inverted to ({t}) which maps to {other:?}"
                    ),
                ),
            },
            Err(e) => report.fail(true, format!("{kind} d={d}: invert({q}) failed: {e}")),
        }
    }
}

/// One randomized equivalence check: expand a random matrix sparsely and
/// through the dense oracle, and require bit-identical results.
fn oracle_trial(seed: u64, trial: u64, report: &mut VerifyReport) {
    report.oracle_checks += 1;
    let mut state = seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut draw = || splitmix64(&mut state);

    let n_rows = 1 + (draw() % 12) as usize;
    let n_cols = (draw() % 25) as usize;
    let density = (draw() >> 11) as f64 / (1u64 << 53) as f64;
    let kind = MappingKind::ALL[(draw() % 4) as usize];
    let spec = match draw() % 3 {
        0 => ExpansionSpec::degree_only(kind),
        1 => ExpansionSpec::new(kind, true, false).expect("lower degrees without bias"),
        _ => ExpansionSpec::new(kind, true, true).expect("lower degrees with bias"),
    };
    let matrix_seed = draw();

    let describe = format!(
        "trial {trial}: {n_rows}x{n_cols} density {density:.3} {kind} lower={} bias={}",
        spec.include_lower_degrees(),
        spec.include_bias()
    );
    let m = match CsrMatrix::random(n_rows, n_cols, density, matrix_seed) {
        Ok(m) => m,
        Err(e) => {
            report.fail(false, format!("{describe}: generation failed: {e}"));
            return;
        }
    };
    let sparse = match expand(&m, spec) {
        Ok(out) => out,
        Err(e) => {
            report.fail(false, format!("{describe}: sparse expansion failed: {e}"));
            return;
        }
    };
    let dense_in = match m.to_dense() {
        Ok(d) => d,
        Err(e) => {
            report.fail(false, format!("{describe}: densification failed: {e}"));
            return;
        }
    };
    let oracle = match expand_dense(&dense_in, spec) {
        Ok(out) => CsrMatrix::from_dense(&out),
        Err(e) => {
            report.fail(false, format!("{describe}: dense expansion failed: {e}"));
            return;
        }
    };
    let bits = |m: &CsrMatrix| m.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    if sparse != oracle || bits(&sparse) != bits(&oracle) {
        report.fail(false, format!("{describe}: sparse and oracle outputs differ"));
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let report = run_verify(8, 10, 7).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
        assert_eq!(report.mapping_failures, 0);
        assert_eq!(report.oracle_failures, 0);
        assert_eq!(report.oracle_checks, 10);
        assert!(report.mapping_checks > 1000);
    }

    #[test]
    fn trials_zero_runs_mappings_only() {
        let report = run_verify(2, 0, 0).unwrap();
        assert!(report.passed());
        assert_eq!(report.oracle_checks, 0);
        assert!(report.mapping_checks > 0);
    }

    #[test]
    fn max_dim_below_two_is_rejected() {
        assert!(matches!(
            run_verify(1, 0, 0),
            Err(CoreError::Argument(_))
        ));
    }

    #[test]
    fn corrupted_forward_map_is_caught() {
        // A double that misplaces exactly one tuple of the 4-column pair
        // interaction layout.
        let corrupted = |t: FeatureTuple, d: usize, kind: MappingKind| {
            let col = forward_map(t, d, kind)?;
            if d == 4 && kind == MappingKind::INTER2 && t.indices() == [1, 2] {
                return Ok(col + 1);
            }
            Ok(col)
        };
        let mut report = VerifyReport::default();
        check_mapping(4, MappingKind::INTER2, &corrupted, &mut report);
        assert!(!report.passed());
        // Misplacement is caught in the enumeration pass and again when
        // inverting the column it vacated.
        assert_eq!(report.mapping_failures, 2);
        assert!(report.failures[0].contains("expected"));
    }
}
