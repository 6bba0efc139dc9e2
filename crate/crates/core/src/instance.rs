//! A base problem composed with one search-space and one objective-space
//! transformation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{self, ProblemId};
use crate::specfun::{inv_reg_inc_beta, reg_inc_beta};
use crate::transforms::{TransformKind, TransformSpec};
use crate::Objectives;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    problem: ProblemId,
    search: TransformSpec,
    objective: TransformSpec,
}

impl ProblemInstance {
    pub fn new(problem: ProblemId, search: TransformSpec, objective: TransformSpec) -> Result<Self> {
        if objective.kind() == TransformKind::SpheredRotation {
            return Err(Error::Config(
                "sphered rotation cannot be applied to the objective space".into(),
            ));
        }
        if let Some(d) = search.dim() {
            if d != problem.dim() {
                return Err(Error::Shape {
                    expected: problem.dim(),
                    actual: d,
                });
            }
        }
        Ok(Self {
            problem,
            search,
            objective,
        })
    }

    /// The untransformed base problem.
    pub fn base(problem: ProblemId) -> Self {
        Self {
            problem,
            search: TransformSpec::Identity,
            objective: TransformSpec::Identity,
        }
    }

    pub fn problem(&self) -> ProblemId {
        self.problem
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn search(&self) -> &TransformSpec {
        &self.search
    }

    pub fn objective(&self) -> &TransformSpec {
        &self.objective
    }

    /// `<problem>__s:<search>__o:<objective>`, e.g. `dtlz1-d2__s:rot-seed3__o:id`.
    pub fn descriptor(&self) -> String {
        format!(
            "{}__s:{}__o:{}",
            self.problem,
            self.search.label(),
            self.objective.label()
        )
    }

    /// Parses a descriptor back into an instance.
    pub fn from_descriptor(text: &str) -> Result<Self> {
        let bad = || Error::Config(format!("malformed instance descriptor {text:?}"));
        let (problem, rest) = text.split_once("__s:").ok_or_else(bad)?;
        let (search, objective) = rest.split_once("__o:").ok_or_else(bad)?;
        let problem: ProblemId = problem.parse()?;
        Self::new(
            problem,
            TransformSpec::parse(search, problem.dim())?,
            TransformSpec::parse(objective, problem.dim())?,
        )
    }

    pub fn evaluate(&self, x_seen: &[f64], eval_index: u64) -> Result<EvaluationRecord> {
        let x_inner = self.search.apply_forward(x_seen)?;
        let f_original = problems::evaluate(self.problem, &x_inner)?;
        let f_seen = warp_objectives(&self.objective, f_original)?;
        Ok(EvaluationRecord {
            eval_index,
            x_seen: x_seen.to_vec(),
            f_seen,
            f_original,
        })
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// One function evaluation as logged by a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    /// 1-based.
    pub eval_index: u64,
    pub x_seen: Vec<f64>,
    pub f_seen: Objectives,
    pub f_original: Objectives,
}

/// Equivalent free-function form of [`ProblemInstance::evaluate`].
pub fn evaluate_instance(
    inst: &ProblemInstance,
    x_seen: &[f64],
    eval_index: u64,
) -> Result<EvaluationRecord> {
    inst.evaluate(x_seen, eval_index)
}

fn objective_shape(t: &TransformSpec, f: Objectives) -> Result<Option<crate::specfun::ShapeParams>> {
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite objective {f:?}")));
    }
    match t {
        TransformSpec::Identity => Ok(None),
        TransformSpec::BetaCdf(p) => Ok(Some(*p)),
        TransformSpec::SpheredRotation(_) => Err(Error::Config(
            "sphered rotation cannot be applied to the objective space".into(),
        )),
    }
}

/// Beta-CDF warp of the objective components inside `[0, 1]`; components
/// outside pass through, so the map is continuous and strictly increasing.
pub fn warp_objectives(t: &TransformSpec, f: Objectives) -> Result<Objectives> {
    let Some(p) = objective_shape(t, f)? else {
        return Ok(f);
    };
    let mut out = f;
    for v in &mut out {
        if (0.0..=1.0).contains(v) {
            *v = reg_inc_beta(*v, p)?;
        }
    }
    Ok(out)
}

pub fn unwarp_objectives(t: &TransformSpec, f_seen: Objectives) -> Result<Objectives> {
    let Some(p) = objective_shape(t, f_seen)? else {
        return Ok(f_seen);
    };
    let mut out = f_seen;
    for v in &mut out {
        if (0.0..=1.0).contains(v) {
            *v = inv_reg_inc_beta(*v, p)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn zdt1() -> ProblemId {
        "zdt1-d2".parse().unwrap()
    }

    #[test]
    fn neutral_composition() {
        let rec = ProblemInstance::base(zdt1()).evaluate(&[0.0, 0.0], 1).unwrap();
        assert_eq!(rec.f_seen, [0.0, 1.0]);
        assert_eq!(rec.f_original, [0.0, 1.0]);
        assert_eq!(rec.eval_index, 1);
    }

    #[test]
    fn search_warp_composes_with_problem() {
        let inst = ProblemInstance::new(
            zdt1(),
            TransformSpec::beta_cdf(2.0, 1.0).unwrap(),
            TransformSpec::Identity,
        )
        .unwrap();
        let rec = inst.evaluate(&[0.5, 0.5], 3).unwrap();
        let g: f64 = 1.0 + 9.0 * 0.25;
        let f2 = g * (1.0 - (0.25 / g).sqrt());
        assert!((rec.f_original[0] - 0.25).abs() < 1e-15);
        assert!((rec.f_original[1] - f2).abs() < 1e-12);
        assert!((f2 - 2.348_61).abs() < 1e-5);
        assert_eq!(rec.f_seen, rec.f_original);
        assert_eq!(rec.x_seen, vec![0.5, 0.5]);
    }

    #[test]
    fn objective_warp_examples() {
        let b12 = TransformSpec::beta_cdf(1.0, 2.0).unwrap();
        let w = warp_objectives(&b12, [0.5, 0.5]).unwrap();
        assert!((w[0] - 0.75).abs() < 1e-15 && (w[1] - 0.75).abs() < 1e-15);
        let w = warp_objectives(&b12, [0.5, 2.0]).unwrap();
        assert!((w[0] - 0.75).abs() < 1e-15 && w[1] == 2.0);
        let u = unwarp_objectives(&b12, [0.75, 2.0]).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15 && u[1] == 2.0);
        let b21 = TransformSpec::beta_cdf(2.0, 1.0).unwrap();
        assert_eq!(warp_objectives(&b21, [1.0, 0.0]).unwrap(), [1.0, 0.0]);
        let id = TransformSpec::Identity;
        assert_eq!(warp_objectives(&id, [0.3, 7.2]).unwrap(), [0.3, 7.2]);
        assert_eq!(unwarp_objectives(&id, [0.3, 7.2]).unwrap(), [0.3, 7.2]);
        assert!(matches!(warp_objectives(&b12, [f64::NAN, 0.0]), Err(Error::Numeric(_))));
    }

    #[test]
    fn objective_warp_on_an_instance_keeps_originals() {
        // DTLZ1 at (0.5, 0.5) gives (0.25, 0.25)
        let inst = ProblemInstance::new(
            "dtlz1-d2".parse().unwrap(),
            TransformSpec::Identity,
            TransformSpec::beta_cdf(1.0, 2.0).unwrap(),
        )
        .unwrap();
        let rec = inst.evaluate(&[0.5, 0.5], 1).unwrap();
        assert!((rec.f_original[0] - 0.25).abs() < 1e-12);
        let expect = 1.0 - 0.75f64 * 0.75;
        assert!((rec.f_seen[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn invalid_instances() {
        let rot = TransformSpec::rotation_seed(2, 1).unwrap();
        assert!(ProblemInstance::new(zdt1(), TransformSpec::Identity, rot.clone()).is_err());
        let rot10 = TransformSpec::rotation_seed(10, 1).unwrap();
        assert!(matches!(
            ProblemInstance::new(zdt1(), rot10, TransformSpec::Identity),
            Err(Error::Shape { .. })
        ));
        assert!(ProblemInstance::new(zdt1(), rot, TransformSpec::Identity).is_ok());
    }

    #[test]
    fn descriptors() {
        let inst = ProblemInstance::new(
            "dtlz1-d2".parse().unwrap(),
            TransformSpec::rotation_seed(2, 3).unwrap(),
            TransformSpec::Identity,
        )
        .unwrap();
        assert_eq!(inst.descriptor(), "dtlz1-d2__s:rot-seed3__o:id");
        assert_eq!(ProblemInstance::from_descriptor(&inst.descriptor()).unwrap(), inst);
        let inst = ProblemInstance::new(
            "zdt3-d10".parse().unwrap(),
            TransformSpec::Identity,
            TransformSpec::beta_cdf(0.2, 5.0).unwrap(),
        )
        .unwrap();
        assert_eq!(inst.descriptor(), "zdt3-d10__s:id__o:beta-a0.2-b5");
        assert_eq!(ProblemInstance::from_descriptor(&inst.descriptor()).unwrap(), inst);
        assert!(ProblemInstance::from_descriptor("zdt3-d10").is_err());
    }

    #[test]
    fn search_map_is_injective_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for search in [
            TransformSpec::beta_cdf(0.5, 2.0).unwrap(),
            TransformSpec::rotation_seed(2, 4).unwrap(),
        ] {
            let mut seen_in = HashSet::new();
            let mut seen_out = HashSet::new();
            for _ in 0..100_000 {
                let x = [rng.random::<f64>(), rng.random::<f64>()];
                let y = search.apply_forward(&x).unwrap();
                seen_in.insert((x[0].to_bits(), x[1].to_bits()));
                seen_out.insert((y[0].to_bits(), y[1].to_bits()));
            }
            assert_eq!(seen_in.len(), seen_out.len());
        }
    }

    fn dominates(a: Objectives, b: Objectives) -> bool {
        a[0] <= b[0] && a[1] <= b[1] && a != b
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn unwarp_inverts_warp(f in prop::array::uniform2(-0.5..1.5f64), a in 0.5..5.0f64, b in 0.5..2.0f64) {
            let t = TransformSpec::beta_cdf(a, b).unwrap();
            let back = warp_objectives(&t, unwarp_objectives(&t, f).unwrap()).unwrap();
            prop_assert!((back[0] - f[0]).abs() <= 1e-9 && (back[1] - f[1]).abs() <= 1e-9);
        }

        #[test]
        fn warp_preserves_dominance(
            f in prop::array::uniform2(0.0..0.9f64),
            g in prop::array::uniform2(0.0..0.9f64),
            a in 0.5..2.0f64,
            b in 0.5..2.0f64,
        ) {
            // kept away from the ranges where the CDF saturates in f64
            let t = TransformSpec::beta_cdf(a, b).unwrap();
            let (wf, wg) = (warp_objectives(&t, f).unwrap(), warp_objectives(&t, g).unwrap());
            prop_assert_eq!(dominates(f, g), dominates(wf, wg));
            prop_assert_eq!(dominates(g, f), dominates(wg, wf));
        }
    }
}
