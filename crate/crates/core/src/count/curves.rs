//! Plane curves shipped with explicit branch data at their singular points.

use crate::count::branches::BranchFileEntry;

#[derive(Debug, Clone)]
pub struct ShippedCurve {
    pub name: &'static str,
    /// Homogeneous equation in `x, y, z`.
    pub poly: &'static str,
    pub degree: u32,
    /// Geometric genera of the components.
    pub genera: Vec<u32>,
    pub branches: Vec<BranchFileEntry>,
}

fn entry(point: [&str; 3], params: &[[String; 2]]) -> BranchFileEntry {
    BranchFileEntry {
        point: point.iter().map(|s| s.to_string()).collect(),
        params: params.iter().map(|p| p.to_vec()).collect(),
        field_ext: 1,
    }
}

fn p2(a: &str, b: &str) -> [String; 2] {
    [a.to_string(), b.to_string()]
}

/// `-sum_{k<terms} 2^k t^{2k+shift}`.
fn geometric(shift: u32, terms: u32) -> String {
    (0..terms)
        .map(|k| format!("{}*t^{}", 1u64 << k, 2 * k + shift))
        .map(|m| format!("-{m}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn nodal_cubic() -> ShippedCurve {
    // lines y = m x through the node, at m = 1 + t and m = -1 + t
    ShippedCurve {
        name: "nodal-cubic",
        poly: "y^2*z - x^3 - x^2*z",
        degree: 3,
        genera: vec![0],
        branches: vec![entry(
            ["0", "0", "1"],
            &[p2("2*t + t^2", "2*t + 3*t^2 + t^3"), p2("-2*t + t^2", "2*t - 3*t^2 + t^3")],
        )],
    }
}

pub fn cuspidal_cubic() -> ShippedCurve {
    ShippedCurve {
        name: "cuspidal-cubic",
        poly: "y^2*z - x^3",
        degree: 3,
        genera: vec![0],
        branches: vec![entry(["0", "0", "1"], &[p2("t^2", "t^3")])],
    }
}

/// The conics `yz = x^2` and `yz = -x^2 + 2z^2`: two nodes and a tacnode.
pub fn conic_pair() -> ShippedCurve {
    ShippedCurve {
        name: "conic-pair",
        poly: "y^2*z^2 - 2*y*z^3 - x^4 + 2*x^2*z^2",
        degree: 4,
        genera: vec![0, 0],
        branches: vec![
            entry(["1", "1", "1"], &[p2("t", "2*t + t^2"), p2("t", "-2*t - t^2")]),
            entry(["-1", "1", "1"], &[p2("t", "-2*t + t^2"), p2("t", "2*t - t^2")]),
            // chart y = 1 with coordinates (x, z)
            entry(["0", "1", "0"], &[p2("t", "t^2"), [geometric(1, 10), geometric(2, 10)]]),
        ],
    }
}

pub fn shipped_curves() -> Vec<ShippedCurve> {
    vec![nodal_cubic(), cuspidal_cubic(), conic_pair()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::branches::{genus_bookkeeping, weil_check, SingularCurve};
    use crate::count::variety::{Ambient, Variety};
    use crate::count::zeta::{dwork_check, zeta_ops};
    use crate::error::Error;
    use crate::report::all_pass;

    fn curve(c: &ShippedCurve, q: u64) -> SingularCurve {
        let v = Variety::parse(Ambient::Projective(2), q, &[c.poly]).unwrap();
        SingularCurve::new(v, &c.branches).unwrap()
    }

    #[test]
    fn invariants_and_weil_bound() {
        for q in [5, 7, 9, 11] {
            for c in shipped_curves() {
                let sc = curve(&c, q);
                for sp in sc.points() {
                    assert!(all_pass(&sp.delta.checks), "{} {:?}", c.name, sp.delta);
                }
                let ga = genus_bookkeeping(&c.genera, &sc.deltas());
                let plane = ((c.degree - 1) * (c.degree - 2) / 2) as i64;
                assert_eq!(ga, plane, "{} over F_{q}", c.name);
                let a = sc.a_d_count(1).unwrap();
                assert!(weil_check(a.a_d, &c.genera, q).passed(), "{} over F_{q}: {a:?}", c.name);
            }
        }
    }

    #[test]
    fn corrected_counts() {
        let nodal = curve(&nodal_cubic(), 5);
        let a = nodal.a_d_count(1).unwrap();
        assert_eq!((a.points, a.a_d), (5, 6));
        assert_eq!(nodal.c_d(), 1);
        let cusp = curve(&cuspidal_cubic(), 5);
        let a = cusp.a_d_count(1).unwrap();
        assert_eq!((a.points, a.a_d), (6, 6));
        assert_eq!(cusp.c_d(), 0);
        let pair = curve(&conic_pair(), 7);
        assert_eq!(pair.c_d(), 3);
        assert_eq!(pair.a_d_count(1).unwrap().a_d, 16);
        let deltas = pair.deltas();
        assert_eq!(deltas, vec![1, 1, 2]);
    }

    #[test]
    fn rationality_of_corrected_zeta() {
        for c in shipped_curves() {
            let sc = curve(&c, 5);
            let b = 2 * c.genera.iter().sum::<u32>() + 2 * c.genera.len() as u32 + 2;
            let counts: Vec<u64> = (1..=b).map(|n| sc.variety().count_points(n).unwrap()).collect();
            let z = zeta_ops(&counts, sc.c_d() as u32).unwrap();
            assert!(all_pass(&z.checks), "{}", c.name);
            let w = dwork_check(&z, &c.genera, 5, 1).unwrap();
            assert!(all_pass(&w.checks), "{}: {:?}", c.name, w.checks);
        }
    }

    #[test]
    fn missing_branch_data_is_reported() {
        let c = conic_pair();
        let v = Variety::parse(Ambient::Projective(2), 5, &[c.poly]).unwrap();
        let err = SingularCurve::new(v, &c.branches[..2]).unwrap_err();
        assert!(matches!(err, Error::Usage(ref m) if m.contains("(0, 1, 0)")), "{err}");
        let v = Variety::parse(Ambient::Projective(2), 5, &[c.poly]).unwrap();
        let mut wrong = c.branches.clone();
        wrong[0].params[0][1] = "3*t".into();
        assert!(SingularCurve::new(v, &wrong).is_err());
    }
}
