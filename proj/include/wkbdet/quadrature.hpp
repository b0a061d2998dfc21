#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "wkbdet/types.hpp"

namespace wkbdet {

namespace detail {
// Nodes/weights of the 7-point Gauss and 15-point Kronrod pair on [-1,1].
// Column 0: abscissa, column 1: Gauss weight, column 2: Kronrod weight.
inline constexpr double kG7K15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0,               0.204432940075298},
    {0.586087235467691, 0.0,               0.169004726639267},
    {0.864864423359769, 0.0,               0.104790010322250},
    {0.991455371120813, 0.0,               0.022935322010529},
};
} // namespace detail

template <class Value, class F>
Value gauss_kronrod_15(const F& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Value y0 = f(mid);
    Value g7 = detail::kG7K15[0][1] * y0;
    Value k15 = detail::kG7K15[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * detail::kG7K15[i][0];
        Value yi = f(mid + dx) + f(mid - dx);
        g7 += detail::kG7K15[i][1] * yi;
        k15 += detail::kG7K15[i][2] * yi;
    }
    g7 *= half;
    k15 *= half;
    err = std::abs(k15 - g7);
    err = 200.0 * err * std::sqrt(200.0 * err);
    return k15;
}

// Adaptive bisection on [a, b]. Tolerances apply to the whole interval.
template <class Value, class F>
Value integrate_adaptive(const F& f, double a, double b,
                         double rel_tol = 1e-13, double abs_tol = 1e-300,
                         int max_depth = 48) {
    struct Seg { double a, b; Value val; double err; int depth; };
    double err0;
    Value whole = gauss_kronrod_15<Value>(f, a, b, err0);
    std::vector<Seg> stack{{a, b, whole, err0, 0}};
    Value total{};
    double total_norm = std::abs(whole);
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        double goal = std::max(abs_tol, rel_tol * std::max(total_norm, 1e-300)) *
                      (s.b - s.a) / (b - a);
        if (s.err <= goal || s.depth >= max_depth) {
            if (s.depth >= max_depth && s.err > 1e3 * goal)
                throw NumericError("integrate_adaptive: refinement limit reached");
            total += s.val;
            continue;
        }
        const double m = 0.5 * (s.a + s.b);
        double e1, e2;
        Value v1 = gauss_kronrod_15<Value>(f, s.a, m, e1);
        Value v2 = gauss_kronrod_15<Value>(f, m, s.b, e2);
        total_norm = std::max(total_norm, std::abs(v1) + std::abs(v2));
        stack.push_back({s.a, m, v1, e1, s.depth + 1});
        stack.push_back({m, s.b, v2, e2, s.depth + 1});
    }
    return total;
}

// Gauss-Legendre nodes on [-1,1], computed once per order by Newton iteration
// on the Legendre polynomial.
struct GaussLegendre {
    std::vector<double> x, w;

    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double p1 = 0.0, p2 = 0.0;
            for (int it = 0; it < 100; ++it) {
                p1 = 1.0;
                p2 = 0.0;
                for (int k = 0; k < n; ++k) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * k + 1.0) * z * p2 - k * p3) / (k + 1.0);
                }
                double dp = n * (z * p1 - p2) / (z * z - 1.0);
                double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            p2 = 0.0;
            p1 = 1.0;
            for (int k = 0; k < n; ++k) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * k + 1.0) * z * p2 - k * p3) / (k + 1.0);
            }
            double dp = n * (z * p1 - p2) / (z * z - 1.0);
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }

    static const GaussLegendre& order20() {
        static const GaussLegendre g(20);
        return g;
    }
    static const GaussLegendre& order40() {
        static const GaussLegendre g(40);
        return g;
    }
};

// Square root with the branch chosen by continuity against a reference value.
// Used for momentum branches along paths; the caller must supply sampling
// fine enough that the true value never jumps by more than a quarter turn.
class BranchTracker {
  public:
    explicit BranchTracker(Complex anchor = 1.0) : prev_(anchor) {}

    Complex sqrt(Complex w) {
        Complex r = std::sqrt(w);
        if (std::real(r * std::conj(prev_)) < 0.0) r = -r;
        prev_ = r;
        return r;
    }

    void reset(Complex anchor) { prev_ = anchor; }
    Complex previous() const { return prev_; }

  private:
    Complex prev_;
};

// Integral of sqrt(msq(q(t))) * q'(t) dt along a parametrized path, with the
// momentum branch continued from `anchor` at t = t0. Each segment is refined
// by halving until two Gauss-Legendre orders agree.
template <class MomentumSq, class Path, class PathDeriv>
Complex path_integral_sqrt(const MomentumSq& msq, const Path& q, const PathDeriv& dq,
                           double t0, double t1, Complex anchor,
                           double rel_tol = 1e-12) {
    const int base_segments = 16;
    int segments = base_segments;
    Complex prev_total = 0.0;
    for (int round = 0; round < 8; ++round) {
        BranchTracker branch(anchor);
        Complex total = 0.0;
        const auto& gl = GaussLegendre::order20();
        for (int s = 0; s < segments; ++s) {
            double a = t0 + (t1 - t0) * s / segments;
            double b = t0 + (t1 - t0) * (s + 1) / segments;
            Complex acc = 0.0;
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                double t = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
                acc += gl.w[i] * branch.sqrt(msq(q(t))) * dq(t);
            }
            total += acc * 0.5 * (b - a);
        }
        if (round > 0 && std::abs(total - prev_total) <=
                             rel_tol * std::max(1.0, std::abs(total)))
            return total;
        prev_total = total;
        segments *= 2;
    }
    return prev_total;
}

} // namespace wkbdet
