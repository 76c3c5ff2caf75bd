use super::lift::{LiftKind, LiftSample, LiftedPatch};
use super::{semi_legendrian_defect, Chart, ContactElement, TangentFrame, C3};
use crate::jets::{parse_expr, Cx, Expr, Jet1, Scalar};
use crate::{Error, Result};
use num_complex::Complex64;

/// A parametrized patch given directly in one chart of the contact space,
/// `(s_1..s_k) ↦ (x, y, λ)` or `(y, x, 1/λ)`.
///
/// Text form, one item per line:
///
/// ```text
/// params: s t
/// domain: [-1, 1] x [-1, 1]
/// x = s + i*t
/// y = (s + i*t)^2/2
/// l = s + i*t          # or `k = ...` for the co-slope 1/λ
/// ```
#[derive(Debug, Clone)]
pub struct ContactPatch {
    pub name: String,
    pub params: Vec<String>,
    pub domain: Vec<(f64, f64)>,
    pub chart: Chart,
    /// Chart coordinates `(a, b, c)`.
    exprs: [Expr; 3],
}

fn parse_range(src: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidInput(format!("bad range `{}`", src.trim()));
    let inner = src.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

impl ContactPatch {
    pub fn new(name: &str, params: &[&str], domain: Vec<(f64, f64)>, chart: Chart, exprs: [Expr; 3]) -> Result<Self> {
        if params.is_empty() || params.len() > 3 || domain.len() != params.len() {
            return Err(Error::InvalidInput("contact patches take 1 to 3 parameters with one range each".into()));
        }
        Ok(ContactPatch {
            name: name.to_string(),
            params: params.iter().map(|s| s.to_string()).collect(),
            domain,
            chart,
            exprs,
        })
    }

    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut params: Option<Vec<String>> = None;
        let mut domain = None;
        let mut x = None;
        let mut y = None;
        let mut fiber: Option<(Chart, String)> = None;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("params:") {
                params = Some(rest.split_whitespace().map(str::to_string).collect());
                continue;
            }
            if let Some(rest) = line.strip_prefix("domain:") {
                domain = Some(rest.split(" x ").map(parse_range).collect::<Result<Vec<_>>>()?);
                continue;
            }
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected `name = expr`, got `{line}`")))?;
            let rhs = rhs.trim().to_string();
            match lhs.trim() {
                "x" => x = Some(rhs),
                "y" => y = Some(rhs),
                "l" => fiber = Some((Chart::Slope, rhs)),
                "k" => fiber = Some((Chart::CoSlope, rhs)),
                other => return Err(Error::UnknownIdentifier(other.to_string())),
            }
        }
        let params = params.ok_or_else(|| Error::InvalidInput("missing `params:` header".into()))?;
        let names: Vec<&str> = params.iter().map(String::as_str).collect();
        let domain = domain.unwrap_or_else(|| vec![(-1.0, 1.0); names.len()]);
        let need = |e: Option<String>, what: &str| e.ok_or_else(|| Error::InvalidInput(format!("missing `{what} =`")));
        let (chart, c) = fiber.ok_or_else(|| Error::InvalidInput("missing `l =` or `k =`".into()))?;
        let ex = parse_expr(&need(x, "x")?, &names)?;
        let ey = parse_expr(&need(y, "y")?, &names)?;
        let ec = parse_expr(&c, &names)?;
        let exprs = match chart {
            Chart::Slope => [ex, ey, ec],
            Chart::CoSlope => [ey, ex, ec],
        };
        Self::new(name, &names, domain, chart, exprs)
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    fn eval_jet<const K: usize>(&self, p: &[f64]) -> Result<[Cx<Jet1<K>>; 3]> {
        let vars: Vec<Jet1<K>> = (0..K).map(|i| Jet1::var(p[i], i)).collect();
        let mut out = [Cx::cst(0.0, 0.0); 3];
        for (o, e) in out.iter_mut().zip(&self.exprs) {
            *o = e.eval(&vars)?.to_cx();
        }
        Ok(out)
    }

    fn element_frame<const K: usize>(&self, p: &[f64]) -> Result<(ContactElement, TangentFrame)> {
        let v = self.eval_jet::<K>(p)?;
        let coords = v.map(|c| Complex64::new(c.re.val(), c.im.val()));
        let vecs: Vec<C3> =
            (0..K).map(|i| v.map(|c| Complex64::new(c.re.g[i], c.im.g[i]))).collect();
        Ok((ContactElement::from_coords(self.chart, coords), TangentFrame { chart: self.chart, vecs }))
    }

    /// Element and tangent frame at parameter `p`.
    pub fn at(&self, p: &[f64]) -> Result<(ContactElement, TangentFrame)> {
        if p.len() != self.dim() {
            return Err(Error::InvalidInput(format!("expected {} parameters, got {}", self.dim(), p.len())));
        }
        match p.len() {
            1 => self.element_frame::<1>(p),
            2 => self.element_frame::<2>(p),
            _ => self.element_frame::<3>(p),
        }
    }

    /// Samples on an `n^k` cell-centred grid, with defects.
    pub fn sample(&self, n: usize) -> Result<LiftedPatch> {
        let k = self.dim();
        let mut samples = Vec::new();
        for idx in 0..n.pow(k as u32) {
            let mut rem = idx;
            let mut p = vec![0.0; k];
            for i in (0..k).rev() {
                let (a, b) = self.domain[i];
                p[i] = a + (b - a) * ((rem % n) as f64 + 0.5) / n as f64;
                rem /= n;
            }
            let (element, frame) = self.at(&p)?;
            let defect = semi_legendrian_defect(&element, &frame)?;
            samples.push(LiftSample { param: p, fiber_angle: None, element, frame, defect, complex_tangent: false });
        }
        Ok(LiftedPatch { source_name: self.name.clone(), dim: k, kind: LiftKind::Raw, samples, excluded: Vec::new() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_differentiates() {
        let m = ContactPatch::parse("w", "params: s t\nx = s + i*t\ny = (s + i*t)^2/2\nl = s + i*t").unwrap();
        let (w, f) = m.at(&[0.5, -0.25]).unwrap();
        assert_eq!(f.vecs.len(), 2);
        assert!((w.slope.value().unwrap() - Complex64::new(0.5, -0.25)).norm() < 1e-15);
        // ∂s = (1, x, 1), ∂t = (i, ix, i)
        assert!((f.vecs[0][1] - Complex64::new(0.5, -0.25)).norm() < 1e-15);
        assert!((f.vecs[1][2] - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn coslope_patch_swaps_coordinates() {
        let m = ContactPatch::parse("v", "params: s\nx = 2\ny = s\nk = 0").unwrap();
        assert_eq!(m.chart, Chart::CoSlope);
        let (w, f) = m.at(&[0.5]).unwrap();
        assert!(w.slope.value().is_none());
        assert_eq!(w.z, [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)]);
        assert_eq!(f.vecs[0], [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn rejects_bad_text() {
        assert!(matches!(ContactPatch::parse("w", "params: s\nx = s\ny = 0"), Err(Error::InvalidInput(_))));
        assert!(matches!(ContactPatch::parse("w", "params: s\nz = s"), Err(Error::UnknownIdentifier(_))));
        assert!(ContactPatch::parse("w", "params: s\nx = s\ny = q\nl = 0").is_err());
    }
}
