//! Phase-invariant comparison measures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unitarity_defect as defect, Mat2};

/// Gate inputs with a larger unitarity defect are rejected.
pub const GATE_UNITARITY_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityKind {
    Gate,
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityScore {
    pub value: f64,
    pub kind: FidelityKind,
}

fn norm(v: &[Complex64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// `|⟨target|psi⟩|²`.
pub fn state_fidelity(psi: &[Complex64; 2], target: &[Complex64; 2]) -> Result<FidelityScore> {
    for v in [psi, target] {
        let n = norm(v);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm: n });
        }
    }
    let overlap = target[0].conj() * psi[0] + target[1].conj() * psi[1];
    Ok(FidelityScore {
        value: overlap.norm_sqr(),
        kind: FidelityKind::State,
    })
}

/// `|Tr(u†v)|²/4`, blind to global phase.
pub fn gate_fidelity(u: &Mat2, v: &Mat2) -> Result<FidelityScore> {
    for m in [u, v] {
        let d = defect(m);
        if !(d < GATE_UNITARITY_LIMIT) {
            return Err(Error::NotUnitary {
                defect: d,
                limit: GATE_UNITARITY_LIMIT,
            });
        }
    }
    Ok(FidelityScore {
        value: (u.adjoint() * *v).trace().norm_sqr() / 4.0,
        kind: FidelityKind::Gate,
    })
}

/// `‖u†u − I‖_F`.
pub fn unitarity_defect(u: &Mat2) -> f64 {
    defect(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Unitary2, ONE, ZERO};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn state_fidelity_examples() {
        let zero = [ONE, ZERO];
        let one = [ZERO, ONE];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [c(s, 0.0), c(s, 0.0)];
        assert_eq!(state_fidelity(&zero, &zero).unwrap().value, 1.0);
        assert_eq!(state_fidelity(&one, &zero).unwrap().value, 0.0);
        assert!((state_fidelity(&plus, &zero).unwrap().value - 0.5).abs() < 1e-15);
        assert!(state_fidelity(&[ONE, ONE], &zero).is_err());
    }

    #[test]
    fn gate_fidelity_examples() {
        let h = *Unitary2::hadamard().matrix();
        assert!((gate_fidelity(&h, &h).unwrap().value - 1.0).abs() < 1e-15);
        assert_eq!(
            gate_fidelity(&Mat2::identity(), Unitary2::not().matrix()).unwrap().value,
            0.0
        );
        let rotated = h.scale(Complex64::from_polar(1.0, 0.77));
        assert!((gate_fidelity(&h, &rotated).unwrap().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn defect_examples() {
        assert_eq!(unitarity_defect(&Mat2::identity()), 0.0);
        let two = Mat2::identity().scale(c(2.0, 0.0));
        assert!((unitarity_defect(&two) - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(gate_fidelity(&two, &Mat2::identity()).is_err());
    }

    fn su2(a: f64, b: f64, g: f64) -> Mat2 {
        *(Unitary2::rz(a) * Unitary2::rx(b) * Unitary2::rz(g)).matrix()
    }

    proptest! {
        #[test]
        fn gate_fidelity_symmetric_and_invariant(
            a in -3.0..3.0f64, b in -3.0..3.0f64, g in -3.0..3.0f64,
            x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64,
            p in -3.0..3.0f64, q in -3.0..3.0f64, r in -3.0..3.0f64,
        ) {
            let u = su2(a, b, g);
            let v = su2(x, y, z);
            let w = su2(p, q, r);
            let f = gate_fidelity(&u, &v).unwrap().value;
            prop_assert!((f - gate_fidelity(&v, &u).unwrap().value).abs() < 1e-12);
            prop_assert!((f - gate_fidelity(&(w * u), &(w * v)).unwrap().value).abs() < 1e-12);
            prop_assert!((f - gate_fidelity(&(u * w), &(v * w)).unwrap().value).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        }

        #[test]
        fn state_fidelity_unitary_invariant(
            a in -3.0..3.0f64, b in -3.0..3.0f64, g in -3.0..3.0f64,
            t1 in 0.0..3.2f64, p1 in -3.2..3.2f64, t2 in 0.0..3.2f64, p2 in -3.2..3.2f64,
        ) {
            let ket = |t: f64, p: f64| [c((t / 2.0).cos(), 0.0), Complex64::from_polar((t / 2.0).sin(), p)];
            let psi = ket(t1, p1);
            let phi = ket(t2, p2);
            let u = su2(a, b, g);
            let f = state_fidelity(&psi, &phi).unwrap().value;
            let g2 = state_fidelity(&u.apply(psi), &u.apply(phi)).unwrap().value;
            prop_assert!((f - g2).abs() < 1e-12);
        }
    }
}
