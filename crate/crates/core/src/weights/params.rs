use rand::Rng;
use serde::{Deserialize, Serialize};

use super::f;
use crate::error::{Error, Result};
use crate::lattice::LatticeSize;
use crate::linalg::C64;
use crate::rng::unit_complex;
use crate::tolerances::POLE;

/// Model parameters: crossing parameter `gamma`, boundary parameter `zeta`,
/// creation constant `phi`, one `lambda` per double row (bottom first) and one
/// `mu` per vertical line (`mu_1` is the rightmost column).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ParamsFile", try_from = "ParamsFile")]
pub struct ModelParams {
    pub gamma: C64,
    pub zeta: C64,
    pub phi: C64,
    pub lambdas: Vec<C64>,
    pub mus: Vec<C64>,
}

impl ModelParams {
    /// Checks `m <= n` and that `gamma` stays away from `2 pi i Z`.
    pub fn new(gamma: C64, zeta: C64, phi: C64, lambdas: Vec<C64>, mus: Vec<C64>) -> Result<Self> {
        let p = Self {
            gamma,
            zeta,
            phi,
            lambdas,
            mus,
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if self.m() > self.n() {
            return Err(Error::Size {
                n: self.n(),
                m: self.m(),
            });
        }
        if f(self.gamma).norm() < POLE {
            return Err(Error::Domain("gamma lies in 2*pi*i*Z".into()));
        }
        let all = [self.gamma, self.zeta, self.phi]
            .into_iter()
            .chain(self.lambdas.iter().copied())
            .chain(self.mus.iter().copied());
        for z in all {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Domain("non-finite parameter".into()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn m(&self) -> usize {
        self.mus.len()
    }

    pub fn size(&self) -> Result<LatticeSize> {
        LatticeSize::new(self.n(), self.m())
    }

    /// Parameter of column `col` (1-based from the left).
    pub fn column_mu(&self, col: usize) -> C64 {
        self.mus[self.m() - col]
    }

    /// Copy without `lambda_l` and `mu_k` (both 1-based; `k = 0` keeps all mus).
    pub fn without(&self, l: usize, k: usize) -> Self {
        let mut p = self.clone();
        p.lambdas.remove(l - 1);
        if k > 0 {
            p.mus.remove(k - 1);
        }
        p
    }

    /// Every denominator the weights and determinant formulas can hit,
    /// labelled for error messages.
    pub fn denominators(&self) -> Vec<(String, C64)> {
        let g = self.gamma;
        let (l, u) = (&self.lambdas, &self.mus);
        let mut out = vec![("f(gamma)".to_string(), f(g))];
        for i in 0..l.len() {
            for j in i..l.len() {
                out.push((
                    format!("f(lambda_{} + lambda_{} + gamma)", i + 1, j + 1),
                    f(l[i] + l[j] + g),
                ));
                if j > i {
                    out.push((
                        format!("f(lambda_{} - lambda_{})", i + 1, j + 1),
                        f(l[i] - l[j]),
                    ));
                }
            }
        }
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                out.push((format!("f(mu_{} + mu_{})", j + 1, i + 1), f(u[j] + u[i])));
                out.push((format!("f(mu_{} - mu_{})", j + 1, i + 1), f(u[j] - u[i])));
            }
        }
        for i in 0..l.len() {
            for j in 0..u.len() {
                out.push((
                    format!("f(lambda_{} + mu_{} + gamma)", i + 1, j + 1),
                    f(l[i] + u[j] + g),
                ));
                out.push((
                    format!("f(lambda_{} - mu_{} + gamma)", i + 1, j + 1),
                    f(l[i] - u[j] + g),
                ));
                out.push((
                    format!("f(mu_{} - lambda_{} + gamma)", j + 1, i + 1),
                    f(u[j] - l[i] + g),
                ));
            }
        }
        out
    }

    /// First denominator whose modulus is below `eps`, if any.
    pub fn genericity_violation(&self, eps: f64) -> Option<String> {
        self.denominators()
            .into_iter()
            .find(|(_, v)| v.norm() < eps)
            .map(|(name, _)| name)
    }

    pub fn is_generic(&self, eps: f64) -> bool {
        self.genericity_violation(eps).is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("params serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            col: e.column(),
            msg: e.to_string(),
        })
    }
}

/// Draws parameters with every part uniform in [-1, 1], redrawing until the
/// genericity predicate holds with margin `eps`.
pub fn sample_params<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, eps: f64) -> ModelParams {
    assert!(m <= n, "sample_params needs m <= n");
    loop {
        let p = ModelParams {
            gamma: unit_complex(rng),
            zeta: unit_complex(rng),
            phi: unit_complex(rng),
            lambdas: (0..n).map(|_| unit_complex(rng)).collect(),
            mus: (0..m).map(|_| unit_complex(rng)).collect(),
        };
        if p.is_generic(eps) && p.phi.norm() > eps {
            return p;
        }
    }
}

/// On-disk form of [`ModelParams`]; complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamsFile {
    n: usize,
    m: usize,
    gamma: [f64; 2],
    zeta: [f64; 2],
    phi: [f64; 2],
    lambda: Vec<[f64; 2]>,
    mu: Vec<[f64; 2]>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn cplx(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl From<ModelParams> for ParamsFile {
    fn from(p: ModelParams) -> Self {
        Self {
            n: p.n(),
            m: p.m(),
            gamma: pair(p.gamma),
            zeta: pair(p.zeta),
            phi: pair(p.phi),
            lambda: p.lambdas.iter().copied().map(pair).collect(),
            mu: p.mus.iter().copied().map(pair).collect(),
        }
    }
}

impl TryFrom<ParamsFile> for ModelParams {
    type Error = Error;

    fn try_from(f: ParamsFile) -> Result<Self> {
        if f.lambda.len() != f.n || f.mu.len() != f.m {
            return Err(Error::Domain(format!(
                "params declare n={}, m={} but list {} lambdas and {} mus",
                f.n,
                f.m,
                f.lambda.len(),
                f.mu.len()
            )));
        }
        ModelParams::new(
            cplx(f.gamma),
            cplx(f.zeta),
            cplx(f.phi),
            f.lambda.into_iter().map(cplx).collect(),
            f.mu.into_iter().map(cplx).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::labeled_rng;

    #[test]
    fn json_round_trip() {
        let p = sample_params(&mut labeled_rng(1, "t"), 3, 2, 0.05);
        let text = p.to_json();
        assert!(text.contains("\"lambda\""));
        assert_eq!(ModelParams::from_json(&text).unwrap(), p);
    }

    #[test]
    fn json_shape_errors() {
        let bad =
            r#"{"n":2,"m":1,"gamma":[1,0],"zeta":[0,0],"phi":[1,0],"lambda":[[0,0]],"mu":[[0,0]]}"#;
        assert!(ModelParams::from_json(bad).is_err());
        let big_m = r#"{"n":1,"m":2,"gamma":[1,0],"zeta":[0,0],"phi":[1,0],"lambda":[[0,0]],"mu":[[0,0],[1,0]]}"#;
        assert!(ModelParams::from_json(big_m).is_err());
    }

    #[test]
    fn gamma_on_lattice_is_rejected() {
        let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
        assert!(ModelParams::new(
            two_pi_i,
            C64::default(),
            C64::default(),
            vec![C64::default()],
            vec![]
        )
        .is_err());
    }

    #[test]
    fn sampler_respects_genericity() {
        let mut rng = labeled_rng(3, "sampler");
        for _ in 0..20 {
            let p = sample_params(&mut rng, 3, 3, 0.05);
            assert!(p.is_generic(0.05));
        }
    }

    #[test]
    fn column_convention() {
        let mus = vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)];
        let p = ModelParams::new(
            C64::new(0.3, 0.1),
            C64::default(),
            C64::default(),
            vec![C64::default(); 2],
            mus,
        )
        .unwrap();
        assert_eq!(p.column_mu(1), C64::new(2.0, 0.0));
        assert_eq!(p.column_mu(2), C64::new(1.0, 0.0));
    }
}
