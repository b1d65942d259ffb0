use super::VerifyError;
use crate::model::{coord, AxisBox};

/// Per-dimension move needed to bring `x` into `region`: zero inside,
/// `x - hi` above, `lo - x` at or below the open lower end.
pub fn leaf_perturbation(x: &[f64], region: &AxisBox) -> Result<Vec<f64>, VerifyError> {
    if region.is_empty() {
        return Err(VerifyError::EmptyBox);
    }
    Ok(region
        .intervals()
        .iter()
        .enumerate()
        .map(|(t, iv)| iv.distance(coord(x, t)))
        .collect())
}

/// Infinity norm of [`leaf_perturbation`], without allocating. The box
/// must be nonempty.
pub fn linf_distance(x: &[f64], region: &AxisBox) -> f64 {
    region
        .intervals()
        .iter()
        .enumerate()
        .map(|(t, iv)| iv.distance(coord(x, t)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Interval;

    fn one(lo: f64, hi: f64) -> AxisBox {
        AxisBox::from_intervals(vec![Interval::new(lo, hi)])
    }

    #[test]
    fn above_the_interval() {
        assert_eq!(leaf_perturbation(&[0.7], &one(0.1, 0.5)).unwrap(), vec![0.7 - 0.5]);
        assert!((leaf_perturbation(&[0.7], &one(0.1, 0.5)).unwrap()[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn below_the_interval() {
        let v = leaf_perturbation(&[0.3], &one(0.5, f64::INFINITY)).unwrap();
        assert_eq!(v, vec![0.5 - 0.3]);
    }

    #[test]
    fn inside_is_zero() {
        let b = AxisBox::from_intervals(vec![Interval::new(0.0, 1.0), Interval::UNBOUNDED]);
        assert_eq!(leaf_perturbation(&[0.5, -7.0], &b).unwrap(), vec![0.0, 0.0]);
        assert_eq!(linf_distance(&[0.5, -7.0], &b), 0.0);
    }

    #[test]
    fn empty_box_is_an_error() {
        assert!(matches!(leaf_perturbation(&[0.0], &one(1.0, 0.0)), Err(VerifyError::EmptyBox)));
    }
}
