#include <cmath>

#include "spectral_internal.hpp"
#include "wkbdet/actions.hpp"
#include "wkbdet/ode.hpp"
#include "wkbdet/quadrature.hpp"
#include "wkbdet/specfun.hpp"
#include "wkbdet/spectral.hpp"

namespace wkbdet::spectral {

namespace {

struct WkbLocal {
    Complex Pi, logderiv, y2, y3;
};

// First- through third-order WKB data for the recessive branch, from the
// momentum-squared derivatives; valid where W stays near the positive axis.
WkbLocal wkb_local(const TrinomialMomentum& m, Real q) {
    Complex W = m.momentum_sq(q);
    Complex W1 = m.momentum_sq_d1(q);
    Complex W2 = m.momentum_sq_d2(q);
    Complex W3 = m.u * Real(m.N) * Real(m.N - 1) * Real(m.N - 2) * std::pow(q, m.N - 3);
    if (m.M >= 3)
        W3 += m.v * Real(m.M) * Real(m.M - 1) * Real(m.M - 2) * std::pow(q, m.M - 3);
    Complex Pi = std::sqrt(W);
    Complex P1 = W1 / (2.0 * Pi);
    Complex P2 = W2 / (2.0 * Pi) - W1 * W1 / (4.0 * Pi * Pi * Pi);
    Complex P3 = W3 / (2.0 * Pi) - 3.0 * W1 * W2 / (4.0 * Pi * Pi * Pi) +
                 3.0 * W1 * W1 * W1 / (8.0 * std::pow(Pi, 5));
    WkbLocal out;
    out.Pi = Pi;
    out.y2 = -P2 / (4.0 * Pi * Pi) + 3.0 * P1 * P1 / (8.0 * Pi * Pi * Pi);
    out.y3 = -P3 / (8.0 * Pi * Pi * Pi) + 0.75 * P1 * P2 / std::pow(Pi, 4) -
             0.75 * P1 * P1 * P1 / std::pow(Pi, 5);
    out.logderiv = -Pi - P1 / (2.0 * Pi) + out.y2 + out.y3;
    return out;
}

// Correction integral_R^inf (y2 + y3) dq by the q = R/t substitution.
Complex wkb_tail_correction(const TrinomialMomentum& m, Real R) {
    return integrate_adaptive<Complex>(
        [&](Real t) {
            Real q = R / t;
            WkbLocal w = wkb_local(m, q);
            return (w.y2 + w.y3) * R / (t * t);
        },
        1e-8, 1.0, 1e-11, 1e-16);
}

struct RawRecessive {
    Complex psihat0, dpsihat0;
    Complex log_norm;  // I - int_0^R Pi + accumulated rescaling
};

RawRecessive integrate_recessive(const TrinomialMomentum& m, Real R, Real ode_rtol,
                                 Complex action_value) {
    Complex S_R = actions::momentum_core_integral(m, 1, R, 1e-13);
    Complex C23 = wkb_tail_correction(m, R);
    WkbLocal at_R = wkb_local(m, R);

    using Stepper = Dop853<Complex, 2>;
    Stepper::Options opt;
    opt.rtol = ode_rtol;
    opt.atol = 1e-280;
    opt.renormalize = [](double, std::array<Complex, 2>& y) {
        Real mag = std::max(std::abs(y[0]), std::abs(y[1]));
        if (mag > 1e120) {
            y[0] /= mag;
            y[1] /= mag;
            return std::log(mag);
        }
        return 0.0;
    };
    Stepper stepper(
        [&](double q, const std::array<Complex, 2>& y, std::array<Complex, 2>& dy) {
            dy[0] = y[1];
            dy[1] = m.momentum_sq(q) * y[0];
        },
        opt);
    std::array<Complex, 2> y{std::pow(at_R.Pi, -0.5) * std::exp(-C23), 0.0};
    y[1] = y[0] * at_R.logderiv;
    Real logscale = stepper.integrate(R, 0.0, y);

    RawRecessive out;
    out.psihat0 = y[0];
    out.dpsihat0 = y[1];
    out.log_norm = action_value - S_R + logscale;
    return out;
}

Real auto_radius(const TrinomialMomentum& m, Real tol) {
    Real scale_v = m.M < m.N && std::abs(m.v) > 0.0
                       ? std::pow(100.0 * std::abs(m.v) / std::abs(m.u), 1.0 / (m.N - m.M))
                       : 0.0;
    Real scale_l = std::pow(100.0 * std::abs(m.lambda) / std::abs(m.u), 1.0 / m.N);
    Real from_tol = std::pow(10.0 / tol, 1.0 / (2.0 * m.N + 2.0));
    return std::max({scale_v, scale_l, from_tol, 6.0});
}

} // namespace

RecessiveSolution recessive_solution(const TrinomialMomentum& m,
                                     const RecessiveOptions& opt) {
    m.validate();
    if (m.u.imag() != 0.0 || m.u.real() <= 0.0)
        throw DomainError("recessive_solution: requires real positive leading coefficient");
    const bool strict = !opt.allow_beyond_sector;
    Complex I = actions::action_continued(m);
    Real R = opt.R > 0.0 ? opt.R : auto_radius(m, opt.tol);

    RawRecessive a = integrate_recessive(m, R, opt.ode_rtol, I);
    RecessiveSolution out;
    out.R = R;
    out.wkb_order = 3;
    out.log_psi0 = std::log(a.psihat0) + a.log_norm;
    out.log_mdpsi0 = std::log(-a.dpsihat0) + a.log_norm;
    out.psi0 = std::exp(out.log_psi0);
    out.dpsi0 = -std::exp(out.log_mdpsi0);
    out.jost_factor = std::exp(out.log_psi0 + out.log_mdpsi0 - 2.0 * I);
    out.error_estimate = 0.0;

    if (opt.r_doubling_check) {
        RawRecessive b = integrate_recessive(m, 2.0 * R, opt.ode_rtol, I);
        Complex psi_b = std::log(b.psihat0) + b.log_norm;
        Complex dpsi_b = std::log(-b.dpsihat0) + b.log_norm;
        // the two runs may differ by 2 pi i windings of the principal log
        auto log_diff = [](Complex a, Complex b2) {
            Complex d = a - b2;
            return std::hypot(d.real(), std::remainder(d.imag(), 2.0 * kPi));
        };
        out.error_estimate = std::max(log_diff(psi_b, out.log_psi0),
                                      log_diff(dpsi_b, out.log_mdpsi0));
        if (strict && out.error_estimate > opt.tol * 100.0)
            throw NumericError("recessive_solution: R-doubling check failed the budget");
    }
    return out;
}

DeterminantValue det_complex(const TrinomialMomentum& m, Parity parity, Complex lambda,
                             const RecessiveOptions& opt) {
    m.validate();
    if (m.lambda != Complex(0.0))
        throw DomainError("det_complex: pass the potential in m and the shift in lambda");
    if (!opt.allow_beyond_sector && std::abs(m.v) > 0.0 && m.M > 0) {
        Real theta = std::abs(std::arg(m.v));
        if (theta >= sector_half_angle(m.N, m.M))
            throw SectorError("det_complex: arg v outside the admissible sector");
    }
    TrinomialMomentum full = m;
    full.lambda = lambda;
    RecessiveSolution sol = recessive_solution(full, opt);

    DeterminantValue out;
    out.parity = parity;
    out.method = DetMethod::RecessiveSolution;
    // normalization constants calibrated against the harmonic closed forms
    out.log_value = parity == Parity::Odd ? sol.log_psi0 : sol.log_mdpsi0;
    out.value = std::exp(out.log_value);
    out.error_estimate = sol.error_estimate;
    return out;
}

std::pair<Complex, Complex> calibrate_recessive_normalization(Real tol) {
    Complex kp = 0.0, km = 0.0;
    int n = 0;
    for (Real Lam : {0.3, 1.1}) {
        TrinomialMomentum harmonic(2, 0, 1.0, 0.0, 0.0);
        RecessiveOptions opt;
        opt.tol = std::min(tol, 1e-8);
        DeterminantValue dp = det_complex(harmonic, Parity::Even, Lam, opt);
        DeterminantValue dm = det_complex(harmonic, Parity::Odd, Lam, opt);
        kp += harmonic_det(Parity::Even, Lam) / dp.value;
        km += harmonic_det(Parity::Odd, Lam) / dm.value;
        ++n;
    }
    kp /= Real(n);
    km /= Real(n);
    if (std::abs(kp - 1.0) > tol || std::abs(km - 1.0) > tol)
        throw NumericError("calibrate_recessive_normalization: drift from the frozen constants");
    return {kp, km};
}

Complex harmonic_det(Parity parity, Complex Lambda) {
    auto near_pole = [](Complex z) {
        return z.imag() == 0.0 && z.real() <= 1e-12 &&
               std::abs(z.real() - std::round(z.real())) < 1e-12;
    };
    const Real sqrt_pi = std::sqrt(kPi);
    if (parity == Parity::Even) {
        Complex a = (1.0 + Lambda) / 4.0;
        if (near_pole(a)) return 0.0;
        return std::pow(Complex(2.0), 1.0 - Lambda / 2.0) * sqrt_pi / specfun::gamma(a);
    }
    Complex a = (3.0 + Lambda) / 4.0;
    if (near_pole(a)) return 0.0;
    return std::pow(Complex(2.0), -Lambda / 2.0) * sqrt_pi / specfun::gamma(a);
}

Complex log_harmonic_det(Parity parity, Complex Lambda) {
    const Real log2 = std::log(2.0);
    if (parity == Parity::Even)
        return (1.0 - Lambda / 2.0) * log2 + 0.5 * std::log(kPi) -
               specfun::log_gamma((1.0 + Lambda) / 4.0);
    return -Lambda / 2.0 * log2 + 0.5 * std::log(kPi) -
           specfun::log_gamma((3.0 + Lambda) / 4.0);
}

DeterminantValue power_det(int M, Parity parity, Complex Lambda, const LogDetOptions& opt) {
    if (M < 2 || M % 2 != 0) throw DomainError("power_det: M must be even and >= 2");
    if (M == 2) {
        DeterminantValue out;
        out.parity = parity;
        out.method = DetMethod::HarmonicClosedForm;
        out.value = harmonic_det(parity, Lambda);
        out.log_value = out.value == Complex(0.0)
                            ? Complex(-std::numeric_limits<Real>::infinity(), 0.0)
                            : log_harmonic_det(parity, Lambda);
        out.error_estimate = 1e-14 * (1.0 + std::abs(out.value));
        return out;
    }
    TrinomialMomentum pot(M, 0, 1.0, 0.0, 0.0);
    return det_entire(pot, parity, Lambda, opt);
}

Complex SymanzikScaling::det_factor(Parity p) const {
    return std::exp((p == Parity::Even ? zeta0_even : zeta0_odd) * std::log(Complex(r)));
}

SymanzikScaling symanzik_rescale(int N, int M, Complex u, Complex v, Complex lambda) {
    if (N <= M || M < 0 || N % 2 != 0 || M % 2 != 0)
        throw DomainError("symanzik_rescale: need even N > M >= 0");
    if (v.imag() != 0.0 || v.real() <= 0.0)
        throw DomainError("symanzik_rescale: requires real v > 0");
    SymanzikScaling out;
    out.r = std::pow(v.real(), 2.0 / (M + 2));
    out.Lambda = lambda * std::pow(v.real(), -2.0 / (M + 2));
    if (u == Complex(0.0)) {
        out.scaled = TrinomialMomentum(M, 0, 1.0, 0.0, out.Lambda);
    } else {
        Complex u_scaled = u * std::pow(v.real(), -Real(N + 2) / (M + 2));
        out.scaled = TrinomialMomentum(N, M, u_scaled, 1.0, out.Lambda);
    }
    const int deg = out.scaled.N;
    Complex res = actions::residue(out.scaled);
    out.zeta0_even = -res / Real(deg) + 0.25;
    out.zeta0_odd = -res / Real(deg) - 0.25;
    return out;
}

} // namespace wkbdet::spectral
