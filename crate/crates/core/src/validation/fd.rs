//! Central finite differences with one Richardson extrapolation.

/// Per-coordinate step sizes for a field over `(a, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub a: f64,
    pub y: f64,
}

impl FdSteps {
    fn scaled(point: (f64, f64), rel: f64) -> Self {
        let scale = |x: f64| if x == 0.0 { 1.0 } else { x.abs() };
        Self {
            a: rel * scale(point.0),
            y: rel * scale(point.1),
        }
    }

    /// `ε^{1/3}` times the magnitude of each coordinate.
    pub fn gradient(point: (f64, f64)) -> Self {
        Self::scaled(point, f64::EPSILON.cbrt())
    }

    /// `ε^{1/4}` times the magnitude of each coordinate.
    pub fn hessian(point: (f64, f64)) -> Self {
        Self::scaled(point, f64::EPSILON.powf(0.25))
    }
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// `f'(x)` from central differences at steps `h` and `h/2`.
pub fn fd_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    richardson(d(h), d(0.5 * h))
}

/// `(∂f/∂a, ∂f/∂y)` at `point`.
pub fn fd_gradient<F: Fn(f64, f64) -> f64>(f: F, point: (f64, f64), steps: FdSteps) -> (f64, f64) {
    let (a, y) = point;
    (
        fd_derivative(|s| f(s, y), a, steps.a),
        fd_derivative(|s| f(a, s), y, steps.y),
    )
}

/// `(∂²f/∂a², ∂²f/∂a∂y, ∂²f/∂y²)` at `point`.
pub fn fd_hessian<F: Fn(f64, f64) -> f64>(
    f: F,
    point: (f64, f64),
    steps: FdSteps,
) -> (f64, f64, f64) {
    let (a, y) = point;
    let centre = f(a, y);
    let second = |g: &dyn Fn(f64) -> f64, x: f64, h: f64| (g(x + h) - 2.0 * centre + g(x - h)) / (h * h);
    let fa = |s: f64| f(s, y);
    let fy = |s: f64| f(a, s);
    let cross = |ha: f64, hy: f64| {
        (f(a + ha, y + hy) - f(a + ha, y - hy) - f(a - ha, y + hy) + f(a - ha, y - hy))
            / (4.0 * ha * hy)
    };
    (
        richardson(second(&fa, a, steps.a), second(&fa, a, 0.5 * steps.a)),
        richardson(cross(steps.a, steps.y), cross(0.5 * steps.a, 0.5 * steps.y)),
        richardson(second(&fy, y, steps.y), second(&fy, y, 0.5 * steps.y)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_gradients() {
        let (da, dy) = fd_gradient(|a, y| a * y, (2.0, 3.0), FdSteps::gradient((2.0, 3.0)));
        assert!((da - 3.0).abs() < 1e-10 && (dy - 2.0).abs() < 1e-10);
        let (da, dy) = fd_gradient(|_, _| 4.2, (1.0, 1.0), FdSteps { a: 0.1, y: 0.1 });
        assert_eq!((da, dy), (0.0, 0.0));
        let d = fd_derivative(f64::sin, 0.7, 1e-2);
        assert!((d - 0.7f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn polynomial_hessians() {
        let (aa, ay, yy) = fd_hessian(|a, y| a * a * y, (1.0, 1.0), FdSteps::hessian((1.0, 1.0)));
        assert!((aa - 2.0).abs() < 1e-6, "{aa}");
        assert!((ay - 2.0).abs() < 1e-6, "{ay}");
        assert!(yy.abs() < 1e-6, "{yy}");
        let (aa, ay, yy) = fd_hessian(|a, y| (a * y).exp(), (0.3, 0.5), FdSteps { a: 1e-2, y: 1e-2 });
        let e = 0.15f64.exp();
        assert!((aa - 0.25 * e).abs() < 1e-7);
        assert!((ay - (1.0 + 0.15) * e).abs() < 1e-7);
        assert!((yy - 0.09 * e).abs() < 1e-7);
    }

    #[test]
    fn cross_stencil_symmetry() {
        let f = |a: f64, y: f64| (a * a + y * y).sqrt() + a * y * y * a;
        let steps = FdSteps { a: 1e-3, y: 1e-3 };
        let (aa, ay, yy) = fd_hessian(f, (1.3, 1.3), steps);
        let (aa2, ay2, yy2) = fd_hessian(|a, y| f(y, a), (1.3, 1.3), steps);
        assert!((ay - ay2).abs() <= 1e-12 * ay.abs());
        assert_eq!(aa, yy2);
        assert_eq!(yy, aa2);
    }

    #[test]
    fn step_scaling() {
        let s = FdSteps::gradient((4.0, -2.0));
        assert!((s.a / s.y - 2.0).abs() < 1e-15);
        assert!(s.a > 0.0 && s.y > 0.0);
        let s = FdSteps::hessian((0.0, 1.0));
        assert_eq!(s.a, s.y);
    }
}
