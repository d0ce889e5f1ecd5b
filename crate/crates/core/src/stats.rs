//! Group summaries, Welch t-tests, outlier filtering and engagement trends.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::features::{FeatureRecord, FeatureRow};
use crate::ingest::{Gender, Group};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TestError {
    #[error("sample too small (n1 = {n1}, n2 = {n2}; need at least 2 each)")]
    TooSmall { n1: usize, n2: usize },
    #[error("both samples have zero variance but different means")]
    ZeroVariance,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Arithmetic mean, summed in sorted order so the result does not depend on
/// the order of the sample.
pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    Some(sorted(xs).iter().sum::<f64>() / xs.len() as f64)
}

/// Unbiased (n - 1) variance.
pub fn sample_variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = sorted(xs).iter().map(|x| (x - m) * (x - m)).sum();
    Some(ss / (xs.len() - 1) as f64)
}

pub fn sample_std(xs: &[f64]) -> Option<f64> {
    sample_variance(xs).map(f64::sqrt)
}

/// Two-sample t-test with unequal variances and Welch–Satterthwaite degrees
/// of freedom. Two-sided p-value.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchResult, TestError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(TestError::TooSmall {
            n1: a.len(),
            n2: b.len(),
        });
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(TestError::NonFinite);
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (m1, m2) = (mean(a).expect("non-empty"), mean(b).expect("non-empty"));
    let (v1, v2) = (
        sample_variance(a).expect("n >= 2"),
        sample_variance(b).expect("n >= 2"),
    );
    let (s1, s2) = (v1 / n1, v2 / n2);
    let se2 = s1 + s2;
    if se2 == 0.0 {
        return if m1 == m2 {
            Ok(WelchResult {
                t: 0.0,
                df: n1 + n2 - 2.0,
                p: 1.0,
            })
        } else {
            Err(TestError::ZeroVariance)
        };
    }
    let t = (m1 - m2) / se2.sqrt();
    let df = se2 * se2 / (s1 * s1 / (n1 - 1.0) + s2 * s2 / (n2 - 1.0));
    Ok(WelchResult {
        t,
        df,
        p: student_t_two_sided(t, df),
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let one_minus_x = t2 / (df + t2);
    beta_reg(df / 2.0, 0.5, x, one_minus_x).clamp(0.0, 1.0)
}

/// Lanczos approximation (g = 7, n = 9) of ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta `I_x(a, b)`. `one_minus_x` is passed
/// separately so callers can supply it without cancellation.
pub fn beta_reg(a: f64, b: f64, x: f64, one_minus_x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if one_minus_x <= 0.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * one_minus_x.ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, one_minus_x) / b
    }
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// The feature variables, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    NumRevisions,
    NumEdits,
    TimeRevising,
    PauseMean,
    Efficiency,
    DiRatio,
}

impl Feature {
    /// Rows of the per-recipe group comparison.
    pub const SUMMARY: [Feature; 4] = [
        Feature::NumRevisions,
        Feature::NumEdits,
        Feature::TimeRevising,
        Feature::PauseMean,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Feature::NumRevisions => "num_revisions",
            Feature::NumEdits => "num_edits",
            Feature::TimeRevising => "time_revising_s",
            Feature::PauseMean => "pause_mean_s",
            Feature::Efficiency => "efficiency",
            Feature::DiRatio => "di_ratio",
        }
    }

    pub fn value(&self, r: &FeatureRecord) -> Option<f64> {
        match self {
            Feature::NumRevisions => Some(r.num_revisions as f64),
            Feature::NumEdits => Some(r.num_edits as f64),
            Feature::TimeRevising => Some(r.time_revising_s),
            Feature::PauseMean => r.pause_mean_s,
            Feature::Efficiency => r.efficiency_ins_per_s,
            Feature::DiRatio => r.di_ratio,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutlierPolicy {
    pub max_time_revising_s: f64,
    pub min_efficiency_ins_per_s: f64,
}

impl Default for OutlierPolicy {
    fn default() -> Self {
        Self {
            max_time_revising_s: 10_000.0,
            min_efficiency_ins_per_s: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("outlier policy bounds must be positive (max time {0}, min efficiency {1})")]
pub struct PolicyError(pub f64, pub f64);

impl OutlierPolicy {
    pub fn new(
        max_time_revising_s: f64,
        min_efficiency_ins_per_s: f64,
    ) -> Result<Self, PolicyError> {
        let p = Self {
            max_time_revising_s,
            min_efficiency_ins_per_s,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.max_time_revising_s > 0.0 && self.min_efficiency_ins_per_s > 0.0 {
            Ok(())
        } else {
            Err(PolicyError(
                self.max_time_revising_s,
                self.min_efficiency_ins_per_s,
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    MaxTime,
    MinEfficiency,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Removal {
    pub user_id: String,
    pub recipe: usize,
    pub reasons: Vec<RemovalReason>,
}

/// Drops rows that revised for longer than the bound (strictly) or whose
/// defined efficiency is below the minimum.
pub fn filter_outliers(
    rows: &[FeatureRow],
    policy: &OutlierPolicy,
) -> (Vec<FeatureRow>, Vec<Removal>) {
    let mut kept = Vec::with_capacity(rows.len());
    let mut removed = Vec::new();
    for row in rows {
        let r = &row.record;
        let mut reasons = Vec::new();
        if r.time_revising_s > policy.max_time_revising_s {
            reasons.push(RemovalReason::MaxTime);
        }
        if r.efficiency_ins_per_s
            .is_some_and(|e| e < policy.min_efficiency_ins_per_s)
        {
            reasons.push(RemovalReason::MinEfficiency);
        }
        if reasons.is_empty() {
            kept.push(row.clone());
        } else {
            removed.push(Removal {
                user_id: r.user_id.clone(),
                recipe: r.recipe_ordinal,
                reasons,
            });
        }
    }
    (kept, removed)
}

fn values<'a>(
    rows: impl IntoIterator<Item = &'a FeatureRow>,
    feature: Feature,
) -> (Vec<f64>, usize) {
    let mut out = Vec::new();
    let mut undefined = 0;
    for row in rows {
        match feature.value(&row.record) {
            Some(v) => out.push(v),
            None => undefined += 1,
        }
    }
    (out, undefined)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub feature: Feature,
    pub g1_mean: Option<f64>,
    pub g1_std: Option<f64>,
    pub g2_mean: Option<f64>,
    pub g2_std: Option<f64>,
    pub t: Option<f64>,
    pub df: Option<f64>,
    pub p_value: Option<f64>,
    pub n1: usize,
    pub n2: usize,
    /// Rows excluded because the value was undefined.
    pub g1_undefined: usize,
    pub g2_undefined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecipeSummary {
    pub recipe: usize,
    pub rows: Vec<SummaryRow>,
    pub diagnostics: Vec<String>,
}

/// G1 vs G2 comparison of the summary features for one recipe, after
/// outlier filtering.
pub fn summarize_by_group(
    rows: &[FeatureRow],
    recipe: usize,
    policy: &OutlierPolicy,
) -> RecipeSummary {
    let (kept, _) = filter_outliers(rows, policy);
    let in_group = |g: Group| {
        kept.iter()
            .filter(move |r| r.record.recipe_ordinal == recipe && r.group == Some(g))
    };
    let mut diagnostics = Vec::new();
    let rows = Feature::SUMMARY
        .iter()
        .map(|&feature| {
            let (a, ua) = values(in_group(Group::G1), feature);
            let (b, ub) = values(in_group(Group::G2), feature);
            if a.is_empty() || b.is_empty() {
                diagnostics.push(format!(
                    "recipe {recipe}, {feature}: empty group after filtering (G1 n={}, G2 n={})",
                    a.len(),
                    b.len()
                ));
            }
            let test = welch_t_test(&a, &b);
            if let Err(e) = &test {
                diagnostics.push(format!("recipe {recipe}, {feature}: t-test undefined: {e}"));
            }
            let test = test.ok();
            SummaryRow {
                feature,
                g1_mean: mean(&a),
                g1_std: sample_std(&a),
                g2_mean: mean(&b),
                g2_std: sample_std(&b),
                t: test.map(|r| r.t),
                df: test.map(|r| r.df),
                p_value: test.map(|r| r.p),
                n1: a.len(),
                n2: b.len(),
                g1_undefined: ua,
                g2_undefined: ub,
            }
        })
        .collect();
    RecipeSummary {
        recipe,
        rows,
        diagnostics,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderTest {
    pub feature: Feature,
    pub female_mean: Option<f64>,
    pub male_mean: Option<f64>,
    pub n_female: usize,
    pub n_male: usize,
    pub t: Option<f64>,
    pub df: Option<f64>,
    pub p_value: Option<f64>,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderComparison {
    pub group: Group,
    pub tests: Vec<GenderTest>,
}

/// Female vs male Welch tests on efficiency and DI ratio within one group,
/// pooling that group's records over all recipes.
pub fn gender_compare(
    rows: &[FeatureRow],
    group: Group,
    policy: &OutlierPolicy,
) -> GenderComparison {
    let (kept, _) = filter_outliers(rows, policy);
    let of = |g: Gender| {
        kept.iter()
            .filter(move |r| r.group == Some(group) && r.gender == g)
    };
    let tests = [Feature::Efficiency, Feature::DiRatio]
        .iter()
        .map(|&feature| {
            let (f, _) = values(of(Gender::Female), feature);
            let (m, _) = values(of(Gender::Male), feature);
            let test = welch_t_test(&f, &m);
            let diagnostic = test
                .as_ref()
                .err()
                .map(|e| format!("{group}, {feature} female vs male: {e}"));
            let test = test.ok();
            GenderTest {
                feature,
                female_mean: mean(&f),
                male_mean: mean(&m),
                n_female: f.len(),
                n_male: m.len(),
                t: test.map(|r| r.t),
                df: test.map(|r| r.df),
                p_value: test.map(|r| r.p),
                diagnostic,
            }
        })
        .collect();
    GenderComparison { group, tests }
}

/// `100 * (later - first) / first`; undefined when `first` is zero.
pub fn percent_change(first: f64, later: f64) -> Option<f64> {
    (first != 0.0).then(|| 100.0 * (later - first) / first)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub group: Group,
    pub feature: Feature,
    pub first_recipe_mean: Option<f64>,
    pub last_recipe_mean: Option<f64>,
    pub percent_change: Option<f64>,
}

/// Per-group percent change of each summary feature's mean from recipe 1 to
/// recipe 3. Rows are used as given (filter beforehand if needed).
pub fn engagement_trend(rows: &[FeatureRow]) -> Vec<TrendRow> {
    engagement_trend_between(rows, 1, 3)
}

pub fn engagement_trend_between(rows: &[FeatureRow], first: usize, last: usize) -> Vec<TrendRow> {
    let mut out = Vec::new();
    for group in Group::ALL {
        for feature in Feature::SUMMARY {
            let at = |recipe: usize| {
                let (v, _) = values(
                    rows.iter()
                        .filter(|r| r.group == Some(group) && r.record.recipe_ordinal == recipe),
                    feature,
                );
                mean(&v)
            };
            let (m1, m3) = (at(first), at(last));
            out.push(TrendRow {
                group,
                feature,
                first_recipe_mean: m1,
                last_recipe_mean: m3,
                percent_change: m1.zip(m3).and_then(|(a, b)| percent_change(a, b)),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub policy: OutlierPolicy,
    pub recipes: Vec<RecipeSummary>,
    pub gender: Vec<GenderComparison>,
    pub trend: Vec<TrendRow>,
    pub outliers: Vec<Removal>,
    /// Rows without a group (no profile); excluded from group statistics.
    pub unassigned_rows: usize,
}

/// Runs every comparison over a feature table.
pub fn analyze(rows: &[FeatureRow], policy: &OutlierPolicy) -> StatsReport {
    let (kept, outliers) = filter_outliers(rows, policy);
    let recipes: BTreeSet<usize> = rows.iter().map(|r| r.record.recipe_ordinal).collect();
    StatsReport {
        policy: *policy,
        recipes: recipes
            .into_iter()
            .map(|k| summarize_by_group(rows, k, policy))
            .collect(),
        gender: Group::ALL
            .iter()
            .map(|&g| gender_compare(rows, g, policy))
            .collect(),
        trend: engagement_trend(&kept),
        outliers,
        unassigned_rows: rows.iter().filter(|r| r.group.is_none()).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(
        user: &str,
        group: Group,
        gender: Gender,
        recipe: usize,
        revisions: u64,
        time: f64,
        eff: Option<f64>,
    ) -> FeatureRow {
        FeatureRow {
            group: Some(group),
            gender,
            record: FeatureRecord {
                user_id: user.into(),
                recipe_ordinal: recipe,
                num_revisions: revisions,
                num_edits: revisions * 10,
                time_revising_s: time,
                di_ratio: Some(0.1),
                efficiency_ins_per_s: eff,
                pause_mean_s: Some(0.5),
            },
        }
    }

    #[test]
    fn identical_samples() {
        let r = welch_t_test(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
        let r = welch_t_test(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            welch_t_test(&[1.0], &[1.0, 2.0]),
            Err(TestError::TooSmall { n1: 1, n2: 2 })
        );
        assert_eq!(
            welch_t_test(&[1.0, 1.0], &[2.0, 2.0]),
            Err(TestError::ZeroVariance)
        );
        assert_eq!(
            welch_t_test(&[1.0, f64::NAN], &[2.0, 2.0]),
            Err(TestError::NonFinite)
        );
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn t_tail_matches_closed_forms() {
        // df = 1 is Cauchy: p = 1 - 2 atan(t) / pi.
        for t in [0.1, 1.0, 3.0, 40.0] {
            let expected = 1.0 - 2.0 * f64::atan(t) / std::f64::consts::PI;
            assert!(
                (student_t_two_sided(t, 1.0) - expected).abs() < 1e-13,
                "t={t}"
            );
        }
        // df = 2: p = 1 - t / sqrt(2 + t^2).
        for t in [0.2f64, 1.5, 7.0] {
            let expected = 1.0 - t / (2.0 + t * t).sqrt();
            assert!(
                (student_t_two_sided(t, 2.0) - expected).abs() < 1e-13,
                "t={t}"
            );
        }
    }

    #[test]
    fn outlier_boundaries() {
        let p = OutlierPolicy::default();
        let rows = vec![
            row("a", Group::G1, Gender::Female, 1, 1, 12_000.0, Some(1.0)),
            row("b", Group::G1, Gender::Female, 1, 1, 10_000.0, Some(1.0)),
            row("c", Group::G1, Gender::Female, 1, 1, 10.0, Some(0.01)),
            row("d", Group::G1, Gender::Female, 1, 1, 10.0, None),
        ];
        let (kept, removed) = filter_outliers(&rows, &p);
        let kept_users: Vec<_> = kept.iter().map(|r| r.record.user_id.as_str()).collect();
        assert_eq!(kept_users, ["b", "d"]);
        assert_eq!(removed[0].reasons, [RemovalReason::MaxTime]);
        assert_eq!(removed[1].reasons, [RemovalReason::MinEfficiency]);
        assert!(OutlierPolicy::new(0.0, 0.05).is_err());
    }

    #[test]
    fn summary_equal_groups() {
        let mut rows = Vec::new();
        for (i, rev) in [1u64, 2, 4].iter().enumerate() {
            rows.push(row(
                &format!("a{i}"),
                Group::G1,
                Gender::Male,
                1,
                *rev,
                10.0 * i as f64,
                Some(2.0),
            ));
            rows.push(row(
                &format!("b{i}"),
                Group::G2,
                Gender::Male,
                1,
                *rev,
                10.0 * i as f64,
                Some(2.0),
            ));
        }
        let s = summarize_by_group(&rows, 1, &OutlierPolicy::default());
        let features: Vec<_> = s.rows.iter().map(|r| r.feature).collect();
        assert_eq!(features, Feature::SUMMARY);
        for r in &s.rows {
            assert_eq!(r.p_value, Some(1.0), "{}", r.feature);
        }
        assert_eq!(s.rows[0].g1_mean, Some(7.0 / 3.0));
        assert!((s.rows[0].g1_std.unwrap() - (7.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn summary_empty_group() {
        let rows = vec![
            row("a", Group::G1, Gender::Male, 1, 1, 1.0, Some(2.0)),
            row("b", Group::G1, Gender::Male, 1, 2, 1.0, Some(2.0)),
        ];
        let s = summarize_by_group(&rows, 1, &OutlierPolicy::default());
        assert!(s
            .rows
            .iter()
            .all(|r| r.p_value.is_none() && r.g2_mean.is_none()));
        assert!(!s.diagnostics.is_empty());
    }

    #[test]
    fn gender_cases() {
        let p = OutlierPolicy::default();
        let mut rows = Vec::new();
        for (i, e) in [1.0, 2.0, 3.5].iter().enumerate() {
            rows.push(row(
                &format!("f{i}"),
                Group::G2,
                Gender::Female,
                1,
                1,
                1.0,
                Some(*e),
            ));
            rows.push(row(
                &format!("m{i}"),
                Group::G2,
                Gender::Male,
                1,
                1,
                1.0,
                Some(*e),
            ));
        }
        let g = gender_compare(&rows, Group::G2, &p);
        assert_eq!(g.tests[0].feature, Feature::Efficiency);
        assert_eq!(g.tests[0].p_value, Some(1.0));

        let males: Vec<_> = rows
            .into_iter()
            .filter(|r| r.gender == Gender::Male)
            .collect();
        let g = gender_compare(&males, Group::G2, &p);
        assert_eq!(g.tests[0].p_value, None);
        assert!(g.tests[0].diagnostic.is_some());
    }

    #[test]
    fn trend_arithmetic() {
        assert!((percent_change(264.01, 86.5).unwrap() + 67.236).abs() < 1e-3);
        assert_eq!(percent_change(5.0, 5.0), Some(0.0));
        assert_eq!(percent_change(0.0, 5.0), None);

        let rows = vec![
            row("a", Group::G1, Gender::Male, 1, 2, 100.0, Some(1.0)),
            row("a", Group::G1, Gender::Male, 3, 1, 50.0, Some(1.0)),
        ];
        let trend = engagement_trend(&rows);
        let time = trend
            .iter()
            .find(|t| t.group == Group::G1 && t.feature == Feature::TimeRevising)
            .unwrap();
        assert_eq!(time.percent_change, Some(-50.0));
        let g2 = trend.iter().find(|t| t.group == Group::G2).unwrap();
        assert_eq!(g2.percent_change, None);
    }
}
