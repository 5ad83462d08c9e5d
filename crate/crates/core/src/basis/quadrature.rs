use glam::DVec3;

/// Deterministic, near-uniform point set on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<DVec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            DVec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Solid-angle weight of each point in an `n`-point uniform rule.
pub fn uniform_weight(n: usize) -> f64 {
    4.0 * std::f64::consts::PI / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_unit_and_balanced() {
        let pts = fibonacci_sphere(4096);
        let mean = pts.iter().copied().sum::<DVec3>() / pts.len() as f64;
        assert!(mean.length() < 1e-3);
        assert!(pts.iter().all(|p| (p.length() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn integrates_low_order_moments() {
        let pts = fibonacci_sphere(4096);
        let w = uniform_weight(pts.len());
        let z2: f64 = pts.iter().map(|p| p.z * p.z * w).sum();
        assert!((z2 - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-3);
    }
}
