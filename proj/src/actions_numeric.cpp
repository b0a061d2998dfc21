#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "wkbdet/actions.hpp"
#include "wkbdet/quadrature.hpp"
#include "wkbdet/specfun.hpp"

namespace wkbdet::actions {

namespace {

Complex cpow_int(Complex z, int n) {
    if (n < 0) return 1.0 / cpow_int(z, -n);
    Complex p = 1.0;
    for (int k = 0; k < n; ++k) p *= z;
    return p;
}

Real beta_fn(Real x, Real y) {
    using specfun::gamma;
    return (gamma(Complex(x)) * gamma(Complex(y)) / gamma(Complex(x + y))).real();
}

// Splitting radius: beyond Q the leading power dominates both lower terms by
// a factor 1e4, so the descending expansion converges fast.
Real split_radius(const TrinomialMomentum& m) {
    Real au = std::abs(m.u);
    Real q1 = m.M < m.N ? std::pow(1e4 * std::abs(m.v) / au, 1.0 / (m.N - m.M)) : 0.0;
    Real q2 = std::pow(1e4 * std::abs(m.lambda) / au, 1.0 / m.N);
    return std::max({q1, q2, 2.0});
}

// Tail integral_Q^inf (V + lambda)^(1/2 - s) dq by the descending expansion.
Complex momentum_tail(const TrinomialMomentum& m, Complex s, Real Q, int depth = 28) {
    Complex total = 0.0;
    const Real ns = (s * Real(m.N)).real();
    for (const auto& t : beta_ladder(m, s, depth)) {
        Real expo = t.rho - ns;  // exponent of q in the term
        if (expo >= -1.0) throw NumericError("momentum_tail: divergent tail term");
        total += t.coeff * std::pow(Q, expo + 1.0) / (-expo - 1.0);
    }
    return total;
}

// Roots of the momentum polynomial u q^N + v q^M + lambda via the companion
// matrix. Used to route integration paths around near-axis turning points.
std::vector<Complex> momentum_roots(const TrinomialMomentum& m) {
    const int n = m.N;
    // bottom-row companion of the monic q^N + (v/u) q^M + (lambda/u)
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) C(i, i + 1) = 1.0;
    C(n - 1, 0) = -m.lambda / m.u;
    if (m.M > 0)
        C(n - 1, m.M) = -m.v / m.u;
    else
        C(n - 1, 0) -= m.v / m.u;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<Complex> out;
    for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

// integral over the waypoint polyline of Pi(q)^ipow dq, branch continued
// backward from the principal value at the last waypoint.
Complex momentum_polyline_integral(const TrinomialMomentum& m, int ipow,
                                   const std::vector<Complex>& pts, Real rel_tol) {
    auto sweep = [&](int per_segment) {
        const auto& gl = GaussLegendre::order20();
        BranchTracker branch(std::sqrt(m.momentum_sq(pts.back())));
        Complex total = 0.0;
        for (int s = int(pts.size()) - 2; s >= 0; --s) {
            Complex a = pts[s + 1], b = pts[s];  // traversed backwards
            for (int p = 0; p < per_segment; ++p) {
                Complex pa = a + (b - a) * Real(p) / Real(per_segment);
                Complex pb = a + (b - a) * Real(p + 1) / Real(per_segment);
                Complex acc = 0.0;
                for (std::size_t i = 0; i < gl.x.size(); ++i) {
                    Complex q = 0.5 * (pa + pb) + 0.5 * (pb - pa) * gl.x[i];
                    Complex pi_q = branch.sqrt(m.momentum_sq(q));
                    acc += gl.w[i] * cpow_int(pi_q, ipow);
                }
                total += acc * 0.5 * (pb - pa);
            }
        }
        return -total;  // orientation pts.front() -> pts.back()
    };
    Complex prev = sweep(8);
    for (int per = 16; per <= 512; per *= 2) {
        Complex cur = sweep(per);
        if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

// integral_0^Q Pi(q)^ipow dq with the momentum branch continued downward from
// the principal value at q = Q; detours around a turning point that sits too
// close to the real segment. ipow is an odd integer (..., -3, -1, 1).
Complex momentum_core_complex(const TrinomialMomentum& m, int ipow, Real Q, Real rel_tol) {
    auto roots = momentum_roots(m);
    Real inner_scale = Q;
    for (const Complex& r : roots)
        if (std::abs(r) > 0.0) inner_scale = std::min(inner_scale, std::abs(r));

    // geometric ladder toward the origin, reaching below the innermost
    // momentum scale so the integrand transition is always resolved
    Real bottom = std::max(inner_scale / 64.0, Q * 1e-18);
    std::vector<Complex> pts{0.0};
    int rungs = std::max(8, (int)std::ceil(std::log2(Q / bottom)));
    for (int k = rungs; k >= 0; --k) pts.push_back(Complex(Q * std::pow(2.0, -k)));

    Real closest = 1e300;
    Complex worst = 0.0;
    for (const Complex& r : roots) {
        Real dist = (r.real() >= 0.0 && r.real() <= Q)
                        ? std::abs(r.imag())
                        : std::min(std::abs(r), std::abs(r - Q));
        if (dist < closest) {
            closest = dist;
            worst = r;
        }
    }
    if (closest < 0.25 * std::max(std::abs(worst), 1e-12)) {
        // detour on the side away from the root: same homotopy class as the
        // real-axis prescription continued from benign parameters
        Real side = worst.imag() >= 0.0 ? -1.0 : 1.0;
        Real d = 0.5 * std::abs(worst);
        Complex detour(worst.real(), side * d);
        std::vector<Complex> routed;
        bool inserted = false;
        for (const Complex& p : pts) {
            if (std::abs(p - worst) < d) {
                if (!inserted) {
                    routed.push_back(detour);
                    inserted = true;
                }
                continue;  // drop ladder points inside the exclusion disc
            }
            if (!inserted && p.real() > worst.real()) {
                routed.push_back(detour);
                inserted = true;
            }
            routed.push_back(p);
        }
        pts = std::move(routed);
    }
    return momentum_polyline_integral(m, ipow, pts, rel_tol);
}

bool momentum_is_positive_real(const TrinomialMomentum& m) {
    return m.real_nonnegative();
}

// integral_0^inf (V + lambda)^(1/2 - s) dq for half-integer s with
// Re(1 - 2s) < -2/N (convergence at infinity); lambda must keep the
// integrand away from zero on the positive axis.
Complex momentum_power_integral(const TrinomialMomentum& m, int ipow, Real rel_tol = 1e-13) {
    if (ipow % 2 == 0) throw DomainError("momentum_power_integral: power must be odd");
    const Complex s = Complex(0.5 * (1.0 - ipow));
    const Real Q = split_radius(m);
    Complex core;
    if (momentum_is_positive_real(m)) {
        core = integrate_adaptive<Real>(
            [&](Real q) { return std::pow(m.momentum_sq(q).real(), 0.5 * ipow); }, 0.0, Q,
            rel_tol);
    } else {
        core = momentum_core_complex(m, ipow, Q, rel_tol);
    }
    return core + momentum_tail(m, s, Q);
}

// One term d * lambda^(alpha - 1) of the large-lambda expansion of
// dI/dlambda; the canonical primitive maps it to d * lambda^alpha / alpha,
// or d * log(lambda) when alpha = 0.
struct AsymTerm {
    Real alpha;
    Complex d;
    bool alpha_is_zero;
};

std::vector<AsymTerm> asym_derivative_terms(int N, int M, Complex u, Complex v, Real cutoff) {
    std::vector<AsymTerm> out;
    const Rational j = exponent_j(N, M);
    for (int a = 0;; ++a) {
        Rational alpha = Rational(N + 2, 2 * N) + Rational(a * (M - N), N);
        if (alpha.to_double() < cutoff) break;
        Real x1 = Real(M * a + 1) / N;
        Real x2 = (a + 0.5) - x1;
        Complex Ja = beta_fn(x1, x2) / Real(N);
        Complex binom_a = 1.0;
        for (int k = 0; k < a; ++k) binom_a *= (Complex(-0.5) - Real(k)) / Real(k + 1);
        Complex d = 0.5 * binom_a * Ja * cpow_int(v, a) * std::pow(u, -Real(1 + a * M) / N);
        out.push_back({alpha.to_double(), d, alpha == Rational(0) || (j.is_integer() && a == j.num)});
    }
    return out;
}

Complex eval_asym_primitive(const std::vector<AsymTerm>& terms, Real lam) {
    Complex total = 0.0;
    for (const auto& t : terms) {
        if (t.alpha_is_zero)
            total += t.d * std::log(lam);
        else
            total += t.d * std::pow(lam, t.alpha) / t.alpha;
    }
    return total;
}

// integral_a^b f with fixed Gauss-Legendre per octave and one halving check.
template <class F>
Complex octave_integral(const F& f, Real a, Real b, Real rel_tol, Real scale_hint) {
    auto sweep = [&](int per_octave) {
        const auto& gl = GaussLegendre::order20();
        Complex total = 0.0;
        Real lo = a;
        while (lo < b) {
            Real hi = std::min(b, 2.0 * lo);
            int pieces = per_octave;
            Real w = (hi - lo) / pieces;
            for (int p = 0; p < pieces; ++p) {
                Real pa = lo + p * w, pb = pa + w;
                Complex acc = 0.0;
                for (std::size_t i = 0; i < gl.x.size(); ++i)
                    acc += gl.w[i] * f(0.5 * (pa + pb) + 0.5 * (pb - pa) * gl.x[i]);
                total += acc * 0.5 * (pb - pa);
            }
            lo = hi;
        }
        return total;
    };
    Complex v1 = sweep(1);
    Complex v2 = sweep(2);
    if (std::abs(v1 - v2) > rel_tol * std::max(scale_hint, std::abs(v2))) {
        Complex v4 = sweep(4);
        if (std::abs(v2 - v4) > 4.0 * rel_tol * std::max(scale_hint, std::abs(v4)))
            throw NumericError("octave_integral: quadrature not converging");
        return v4;
    }
    return v2;
}

struct FitOutcome {
    Complex constant;      // fitted lambda^0 coefficient
    Real residual_rms = 0.0;
};

// Least-squares fit of y_i over {1} + {lambda^alpha} columns, in long double.
FitOutcome fit_constant(const std::vector<Real>& lam, const std::vector<Complex>& y,
                        const std::vector<Real>& deep_alphas) {
    using LD = long double;
    const int n = int(lam.size());
    const int k = 1 + int(deep_alphas.size());
    Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic> A(n, k);
    Eigen::Matrix<LD, Eigen::Dynamic, 2> B(n, 2);
    std::vector<LD> colscale(k, 1.0L);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = 1.0L;
        for (int c = 0; c < int(deep_alphas.size()); ++c)
            A(i, 1 + c) = std::pow((LD)lam[i], (LD)deep_alphas[c]);
        B(i, 0) = (LD)y[i].real();
        B(i, 1) = (LD)y[i].imag();
    }
    for (int c = 0; c < k; ++c) {
        LD m = 0.0L;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(A(i, c)));
        colscale[c] = m > 0.0L ? m : 1.0L;
        for (int i = 0; i < n; ++i) A(i, c) /= colscale[c];
    }
    auto qr = A.colPivHouseholderQr();
    Eigen::Matrix<LD, Eigen::Dynamic, 2> coef = qr.solve(B);
    Eigen::Matrix<LD, Eigen::Dynamic, 2> resid = A * coef - B;
    FitOutcome out;
    out.constant = Complex((double)(coef(0, 0) / colscale[0]), (double)(coef(0, 1) / colscale[0]));
    out.residual_rms = (double)std::sqrt((resid.array() * resid.array()).sum() / n);
    return out;
}

RegularizedAction numeric_m1(const TrinomialMomentum& m, const NumericActionOptions& opt) {
    const Real lam = m.lambda.real();
    const Real tol = opt.tol;
    // window start: expansion parameter at most 0.1 at the bottom fit point
    Real eps_floor = std::abs(m.u) *
                     std::pow(10.0 * std::abs(m.v) / std::abs(m.u), Real(m.N) / (m.N - m.M));
    Real lam_star = std::max({eps_floor, 16.0 * lam, 4.0});
    int i0 = std::max(1, (int)std::ceil(std::log2(lam_star / lam)));
    const int P = std::max(6, opt.fit_points / 2);
    const int extra = 2;  // octaves for the dilation stability check
    const int top = i0 + P - 1 + extra;

    auto F = [&](Real lp) {
        TrinomialMomentum shifted = m;
        shifted.lambda = lp;
        return 0.5 * momentum_power_integral(shifted, -1).real();
    };

    // accumulate G_i = integral_lambda^{lambda 2^i} F
    std::vector<Real> grid(top + 1), G(top + 1, 0.0);
    for (int i = 0; i <= top; ++i) grid[i] = lam * std::pow(2.0, i);
    for (int i = 1; i <= top; ++i)
        G[i] = G[i - 1] +
               octave_integral([&](Real x) { return Complex(F(x)); }, grid[i - 1], grid[i],
                               1e-14, std::abs(G[i - 1]))
                   .real();

    auto terms = asym_derivative_terms(m.N, m.M, m.u, m.v, opt.ladder_cutoff);
    Real first_omitted = terms.back().alpha + Real(m.M - m.N) / m.N;

    auto fit_window = [&](int lo_idx, int hi_idx) {
        std::vector<Real> xs;
        std::vector<Complex> ys;
        for (int i = lo_idx; i <= hi_idx; ++i) {
            xs.push_back(grid[i]);
            ys.push_back(G[i] - eval_asym_primitive(terms, grid[i]));
        }
        return fit_constant(xs, ys, {first_omitted});
    };

    FitOutcome f0 = fit_window(i0, i0 + P - 1);
    FitOutcome f1 = fit_window(i0 + 1, i0 + P);
    FitOutcome f2 = fit_window(i0 + 2, i0 + P + 1);
    Real drift = std::max(std::abs(f1.constant - f0.constant),
                          std::abs(f2.constant - f1.constant));
    if (drift > tol)
        throw NumericError("action_numeric: fitted constant unstable across grid dilations");

    RegularizedAction out;
    out.method = ActionMethod::NumericCanonical;
    out.value = -f2.constant;
    out.residue = residue(m);
    out.error_estimate =
        std::max({drift, f2.residual_rms, 1e-15 * std::abs(G[top]), 1e-16});
    return out;
}

// Harmonic route: two lambda-derivatives with the constant-free rule applied
// at each integration level. The double integral collapses by parts to a
// single quadrature with kernel (t - lambda).
RegularizedAction numeric_m2(const TrinomialMomentum& m, const NumericActionOptions& opt) {
    const Real lam = m.lambda.real();
    const Real w = m.u.real();
    auto F2 = [&](Real lp) {
        TrinomialMomentum shifted = m;
        shifted.lambda = lp;
        return -0.25 * momentum_power_integral(shifted, -3).real();
    };
    auto eval_at = [&](Real lam_star) {
        // dI/dlambda(L*) and I_asym(L*) from the exact harmonic ladder
        Real Y_star = -0.25 / std::sqrt(w) * std::log(lam_star);
        Real I_star = -0.25 / std::sqrt(w) * lam_star * (std::log(lam_star) - 1.0);
        Complex corr = octave_integral(
            [&](Real t) { return Complex((t - lam) * F2(t)); }, lam, lam_star, 1e-14,
            std::abs(I_star));
        return I_star - Y_star * (lam_star - lam) + corr.real();
    };
    Real lam_star = std::max(64.0 * lam, 64.0);
    Real v1 = eval_at(lam_star), v2 = eval_at(2.0 * lam_star), v3 = eval_at(4.0 * lam_star);
    Real drift = std::max(std::abs(v2 - v1), std::abs(v3 - v2));
    if (drift > opt.tol)
        throw NumericError("action_numeric: constant unstable across grid dilations");
    RegularizedAction out;
    out.method = ActionMethod::NumericCanonical;
    out.value = v3;
    out.residue = residue(m);
    out.error_estimate = std::max(drift, 1e-15 * std::abs(v3));
    return out;
}

} // namespace

Complex action_lambda_derivative(const TrinomialMomentum& m, Real rel_tol) {
    if (m.N < 4) throw DomainError("action_lambda_derivative: requires N >= 4");
    if (m.lambda == Complex(0.0) && m.M > 0)
        throw DomainError("action_lambda_derivative: lambda = 0 endpoint is singular");
    return 0.5 * momentum_power_integral(m, -1, rel_tol);
}

Complex momentum_core_integral(const TrinomialMomentum& m, int ipow, Real R, Real rel_tol) {
    if (ipow % 2 == 0) throw DomainError("momentum_core_integral: power must be odd");
    if (momentum_is_positive_real(m) && (m.lambda != Complex(0.0) || ipow > 0)) {
        return integrate_adaptive<Real>(
            [&](Real q) { return std::pow(m.momentum_sq(q).real(), 0.5 * ipow); }, 0.0, R,
            rel_tol);
    }
    return momentum_core_complex(m, ipow, R, rel_tol);
}

Complex canonical_action(const TrinomialMomentum& m, Real tol) {
    if (!m.real_nonnegative())
        throw DomainError("canonical_action: requires real non-negative parameters");
    if (m.lambda == Complex(0.0)) return action_binomial(m.u, m.v, m.N, m.M).value;
    if (m.N == 4 && m.M == 2 && m.u == Complex(1.0))
        return action_quartic(m.v.real(), m.lambda.real()).value;
    if (m.N == 2) {
        return -0.25 * std::pow(m.u.real(), -0.5) * m.lambda *
               (std::log(m.lambda) - 1.0);
    }
    if (m.v == Complex(0.0))
        return action_binomial(m.u, m.lambda, m.N, 0).value;
    NumericActionOptions opt;
    opt.tol = tol;
    return action_numeric(m, opt).value;
}

RegularizedAction action_numeric(const TrinomialMomentum& m, const NumericActionOptions& opt) {
    m.validate();
    if (!m.real_nonnegative())
        throw DomainError("action_numeric: requires positive real parameters");
    if (m.lambda.real() == 0.0) {
        // the derivative route loses its reference structure at lambda = 0
        RegularizedAction out = action_binomial(m.u, m.v, m.N, m.M);
        return out;
    }
    if (m.N >= 4) return numeric_m1(m, opt);
    if (m.M != 0) throw DomainError("action_numeric: N = 2 supports only the harmonic binomial");
    return numeric_m2(m, opt);
}

Complex action_continued(const TrinomialMomentum& m, Real rel_tol) {
    m.validate();
    if (m.N < 4) {
        if (m.N == 2 && m.M == 0) {
            // harmonic closed form continued: -1/4 u^{-1/2} lambda (log lambda - 1)
            return -0.25 * std::pow(m.u, -0.5) * m.lambda * (std::log(m.lambda) - 1.0);
        }
        throw DomainError("action_continued: requires N >= 4 (or the harmonic binomial)");
    }
    if (momentum_is_positive_real(m) && m.N == 4 && m.M == 2 &&
        std::abs(m.u - Complex(1.0)) == 0.0)
        return action_quartic(m.v.real(), m.lambda.real()).value;

    Complex anchor = action_binomial(m.u, m.v, m.N, m.M).value;
    if (m.lambda == Complex(0.0)) return anchor;

    // One q-contour serves every point of the lambda path. When a momentum
    // root sits close to the positive real axis (the turning points pinch
    // the axis at the exact conjugate alignment), the contour dips to the
    // far side with scale-free geometry, keeping the integrand analytic in
    // lambda along the whole path.
    const Real Q = split_radius(m);
    std::vector<Complex> pts;
    {
        auto roots = momentum_roots(m);
        Real closest = 1e300, inner_scale = Q;
        Complex worst = 0.0;
        for (const Complex& r : roots) {
            if (std::abs(r) > 0.0) inner_scale = std::min(inner_scale, std::abs(r));
            Real dist = (r.real() >= 0.0 && r.real() <= Q)
                            ? std::abs(r.imag())
                            : std::min(std::abs(r), std::abs(r - Q));
            if (dist < closest) {
                closest = dist;
                worst = r;
            }
        }
        pts.push_back(0.0);
        if (closest < 0.3 * std::max(std::abs(worst), 1e-12)) {
            Real side = worst.imag() >= 0.0 ? -1.0 : 1.0;
            Complex P1 = std::abs(worst) * std::polar(1.0, side * 0.7);
            for (int k = 44; k >= 0; --k) pts.push_back(P1 * std::pow(2.0, -k));
            Real x = 2.5 * std::abs(worst);
            while (x < Q) {
                pts.push_back(Complex(x));
                x *= 2.0;
            }
        } else {
            Real bottom = std::max(inner_scale / 64.0, Q * 1e-18);
            int rungs = std::max(8, (int)std::ceil(std::log2(Q / bottom)));
            for (int k = rungs; k >= 1; --k) pts.push_back(Complex(Q * std::pow(2.0, -k)));
        }
        pts.push_back(Complex(Q));
    }

    const Real smax = 30.0;
    auto Fpath = [&](Real s) {
        TrinomialMomentum shifted = m;
        shifted.lambda = std::exp(-s) * m.lambda;
        Complex core = momentum_polyline_integral(shifted, -1, pts, 1e-12);
        Complex whole = core + momentum_tail(shifted, 1.0, Q);
        return 0.5 * whole * std::exp(-s) * m.lambda;
    };
    Real hint = std::max(1.0, std::abs(anchor));
    Complex path = octave_integral([&](Real s) { return Fpath(s); }, 1e-3, smax,
                                   rel_tol, hint) +
                   Fpath(0.5e-3) * 1e-3;  // midpoint patch for the first sliver
    return anchor + path;
}

} // namespace wkbdet::actions
