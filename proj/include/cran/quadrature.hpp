#pragma once

#include <cmath>
#include <vector>

namespace cran::quadrature {

struct SimpsonOptions {
    double relative_tolerance = 1e-10;
    int max_depth = 40;
    int initial_panels = 8;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

template <class F>
struct SimpsonState {
    const F& f;
    int max_depth;
    int evaluations = 0;
    double error = 0.0;
    bool converged = true;

    // Richardson-corrected recursive Simpson. `tol` is the absolute target for
    // [a, b]; it is halved together with the interval.
    double refine(double a, double b, double fa, double fm, double fb, double whole, double tol,
                  int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        evaluations += 2;
        const double h = b - a;
        const double left = h / 12.0 * (fa + 4.0 * flm + fm);
        const double right = h / 12.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) {
            error += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        if (depth >= max_depth || m <= a || b <= m) {
            converged = false;
            error += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

}  // namespace detail

/// Adaptive Simpson on [a, b] to a relative tolerance of the integral.
/// The interval is pre-split into `initial_panels` equal panels so that a
/// coarse first estimate cannot miss a narrow feature entirely.
template <class F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, const SimpsonOptions& opt = {}) {
    QuadratureResult out;
    if (!(b > a)) {
        return out;
    }
    const int panels = opt.initial_panels < 1 ? 1 : opt.initial_panels;
    const double width = (b - a) / panels;

    struct Panel {
        double a, b, fa, fm, fb, whole;
    };
    std::vector<Panel> ps;
    ps.reserve(static_cast<std::size_t>(panels));

    // Coarse pass fixes the absolute target from the whole-interval magnitude.
    double coarse = 0.0;
    double fa = f(a);
    out.evaluations = 1;
    for (int k = 0; k < panels; ++k) {
        const double pa = a + k * width;
        const double pb = (k + 1 == panels) ? b : a + (k + 1) * width;
        const double fm = f(0.5 * (pa + pb));
        const double fb = f(pb);
        out.evaluations += 2;
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        ps.push_back({pa, pb, fa, fm, fb, whole});
        coarse += std::abs(whole);
        fa = fb;
    }

    const double target = opt.relative_tolerance * coarse;
    detail::SimpsonState<F> state{f, opt.max_depth};
    double sum = 0.0;
    for (const auto& p : ps) {
        sum += state.refine(p.a, p.b, p.fa, p.fm, p.fb, p.whole, target / panels, 0);
    }

    out.value = sum;
    out.error_estimate = state.error;
    out.evaluations += state.evaluations;
    out.converged = state.converged;
    return out;
}

}  // namespace cran::quadrature
