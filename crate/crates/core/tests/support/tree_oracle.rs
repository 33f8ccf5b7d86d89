//! Brute-force decision tree: every feature, every midpoint threshold,
//! weighted Gini impurity in exact rationals. Ties keep the first candidate
//! in (feature, threshold) order.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frac {
    num: i128,
    den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    fn new(num: i128, den: i128) -> Self {
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Frac { num: s * num / g, den: s * den / g }
    }
    fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    fn sub(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
    fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }
    fn lt(self, o: Frac) -> bool {
        self.num * o.den < o.num * self.den
    }
}

fn gini(samples: &[(Vec<f64>, bool)]) -> Frac {
    let m = samples.len() as i128;
    let g = samples.iter().filter(|s| s.1).count() as i128;
    let n = m - g;
    Frac::new(1, 1).sub(Frac::new(g * g, m * m)).sub(Frac::new(n * n, m * m))
}

pub enum OracleTree {
    Leaf { gang: usize, nongang: usize },
    Split { feature: usize, threshold: f64, left: Box<OracleTree>, right: Box<OracleTree> },
}

pub fn grow(samples: &[(Vec<f64>, bool)]) -> OracleTree {
    let gang = samples.iter().filter(|s| s.1).count();
    let nongang = samples.len() - gang;
    if gang == 0 || nongang == 0 {
        return OracleTree::Leaf { gang, nongang };
    }
    let total = samples.len() as i128;
    let dim = samples[0].0.len();
    let mut best: Option<(Frac, usize, f64)> = None;
    for f in 0..dim {
        let mut values: Vec<f64> = samples.iter().map(|s| s.0[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let t = (pair[0] + pair[1]) / 2.0;
            let (l, r): (Vec<_>, Vec<_>) = samples.iter().cloned().partition(|s| s.0[f] <= t);
            let weighted = Frac::new(l.len() as i128, total)
                .mul(gini(&l))
                .add(Frac::new(r.len() as i128, total).mul(gini(&r)));
            if best.is_none_or(|(b, _, _)| weighted.lt(b)) {
                best = Some((weighted, f, t));
            }
        }
    }
    match best {
        None => OracleTree::Leaf { gang, nongang },
        Some((_, feature, threshold)) => {
            let (l, r): (Vec<_>, Vec<_>) = samples.iter().cloned().partition(|s| s.0[feature] <= threshold);
            OracleTree::Split { feature, threshold, left: Box::new(grow(&l)), right: Box::new(grow(&r)) }
        }
    }
}

impl OracleTree {
    pub fn predicts_gang(&self, x: &[f64]) -> bool {
        match self {
            OracleTree::Leaf { gang, nongang } => gang > nongang,
            OracleTree::Split { feature, threshold, left, right } => {
                if x[*feature] <= *threshold {
                    left.predicts_gang(x)
                } else {
                    right.predicts_gang(x)
                }
            }
        }
    }
}
