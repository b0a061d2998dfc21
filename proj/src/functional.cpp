#include <cmath>

#include "wkbdet/actions.hpp"
#include "wkbdet/functional.hpp"
#include "wkbdet/specfun.hpp"

namespace wkbdet::functional {

namespace {

Complex unit_phase(Real angle) { return std::polar(1.0, angle); }

// delta_{M,2} A(lambda, v) = [(N+2) log v + 4N log 2] Lambda / (8(N-2))
Complex coupling_anomaly(int N, int M, Complex v, Complex Lambda) {
    if (M != 2) return 0.0;
    return (Real(N + 2) * std::log(v) + 4.0 * N * std::log(2.0)) * Lambda /
           (8.0 * Real(N - 2));
}

DeterminantValue det_at(int N, int M, Complex v, Complex lambda,
                        const WronskianOptions& opt) {
    TrinomialMomentum pot(N, M, 1.0, v, 0.0);
    spectral::RecessiveOptions ropt;
    ropt.ode_rtol = opt.ode_rtol;
    ropt.tol = opt.det_tol;
    ropt.allow_beyond_sector = opt.allow_beyond_sector;
    return spectral::det_complex(pot, Parity::Even, lambda, ropt);
}

std::pair<Complex, Complex> det_pair_at(int N, int M, Complex v, Complex lambda,
                                        const WronskianOptions& opt) {
    TrinomialMomentum pot(N, M, 1.0, v, 0.0);
    spectral::RecessiveOptions ropt;
    ropt.ode_rtol = opt.ode_rtol;
    ropt.tol = opt.det_tol;
    ropt.allow_beyond_sector = opt.allow_beyond_sector;
    TrinomialMomentum full = pot;
    full.lambda = lambda;
    if (!ropt.allow_beyond_sector && std::abs(v) > 0.0 && M > 0) {
        Real theta = std::abs(std::arg(v));
        if (theta >= spectral::sector_half_angle(N, M))
            throw SectorError("wronskian: arg v outside the admissible sector");
    }
    auto sol = spectral::recessive_solution(full, ropt);
    // D+ = -psi'(0) = exp(log_mdpsi0), D- = psi(0)
    return {std::exp(sol.log_mdpsi0), std::exp(sol.log_psi0)};
}

} // namespace

ConjugateProblem conjugate_params(int N, int M, Complex lambda, Complex v) {
    if (N <= M || N % 2 != 0 || M % 2 != 0 || M < 0)
        throw DomainError("conjugate_params: need even N > M >= 0");
    ConjugateProblem out;
    out.phi_N = 4.0 * kPi / (N + 2);
    out.phi_M = 4.0 * kPi / (M + 2);
    const Real j = exponent_j(N, M).to_double();
    out.lambda1 = unit_phase(-out.phi_N) * lambda;
    out.v1 = unit_phase(kPi / j) * v;
    // Lambda^[1] both ways, asserted equal
    Complex Lambda = std::pow(v, -2.0 / (M + 2)) * lambda;
    Complex route_a = std::pow(out.v1, -2.0 / (M + 2)) * out.lambda1;
    Complex route_b = unit_phase(-out.phi_M) * Lambda;
    if (std::abs(route_a - route_b) >
        1e-12 * std::max(1.0, std::abs(route_b)) + 1e-300)
        throw NumericError("conjugate_params: Lambda^[1] route mismatch");
    out.Lambda1 = route_b;
    out.z = unit_phase(out.phi_N / 4.0 + kPi / (2.0 * (M + 2) * j));
    return out;
}

WronskianCheck wronskian_check(int N, int M, Complex lambda, Complex v,
                               const WronskianOptions& opt) {
    WronskianCheck out;
    if (N == 2) {
        // pure harmonic problem: Gamma closed forms, phi_2 = pi
        Complex Lam = lambda;
        Complex Lam1 = -Lam;
        Complex Dp = spectral::harmonic_det(Parity::Even, Lam);
        Complex Dm = spectral::harmonic_det(Parity::Odd, Lam);
        Complex Dp1 = spectral::harmonic_det(Parity::Even, Lam1);
        Complex Dm1 = spectral::harmonic_det(Parity::Odd, Lam1);
        Complex beta = Lam / 2.0;
        out.rhs = 2.0 * Complex(0.0, 1.0) * std::exp(Complex(0.0, kPi / 2.0) * beta);
        out.lhs = unit_phase(kPi / 4.0) * Dp1 * Dm - unit_phase(-kPi / 4.0) * Dp * Dm1;
        out.residual = out.lhs - out.rhs;
        out.base_lambda = Lam;
        out.base_v = 0.0;
        return out;
    }
    if (N < 4 || M < 2) throw DomainError("wronskian_check: need N >= 4, M >= 2");
    ConjugateProblem cp = conjugate_params(N, M, lambda, v);
    const Real j = exponent_j(N, M).to_double();
    // symmetric frame: half of the conjugate rotation applied backwards
    Complex la = unit_phase(+cp.phi_N / 2.0) * lambda;
    Complex va = unit_phase(-kPi / (2.0 * j)) * v;
    Complex lb = unit_phase(-cp.phi_N / 2.0) * lambda;
    Complex vb = unit_phase(+kPi / (2.0 * j)) * v;

    auto [Dp_a, Dm_a] = det_pair_at(N, M, va, la, opt);
    auto [Dp_b, Dm_b] = det_pair_at(N, M, vb, lb, opt);

    TrinomialMomentum base(N, M, 1.0, va, la);
    Complex beta = actions::residue(base);
    out.rhs = 2.0 * Complex(0.0, 1.0) *
              std::exp(Complex(0.0, cp.phi_N / 2.0) * beta);
    out.lhs = unit_phase(+cp.phi_N / 4.0) * Dp_b * Dm_a -
              unit_phase(-cp.phi_N / 4.0) * Dp_a * Dm_b;
    out.residual = out.lhs - out.rhs;
    out.base_lambda = la;
    out.base_v = va;
    return out;
}

Complex wronskian_residual(int N, int M, Complex lambda, Complex v,
                           const WronskianOptions& opt) {
    return wronskian_check(N, M, lambda, v, opt).residual;
}

FactorizationCheck large_v_factorization(int N, int M, Real lambda, Complex v,
                                         const WronskianOptions& opt) {
    if (N <= M || M < 2 || N % 2 != 0 || M % 2 != 0)
        throw DomainError("large_v_factorization: need even N > M >= 2");
    FactorizationCheck out;
    out.Lambda = std::pow(v, -2.0 / (M + 2)) * lambda;
    out.anomaly = coupling_anomaly(N, M, v, out.Lambda);
    Complex I_v = actions::action_binomial(1.0, v, N, M).value;
    Complex prefactor = std::exp(I_v + out.anomaly);
    Complex vpow_p = std::pow(v, +1.0 / (2.0 * (M + 2)));
    Complex vpow_m = std::pow(v, -1.0 / (2.0 * (M + 2)));
    out.predicted_plus =
        prefactor * vpow_p * spectral::power_det(M, Parity::Even, out.Lambda).value;
    out.predicted_minus =
        prefactor * vpow_m * spectral::power_det(M, Parity::Odd, out.Lambda).value;
    auto [Dp, Dm] = det_pair_at(N, M, v, lambda, opt);
    out.computed_plus = Dp;
    out.computed_minus = Dm;
    out.ratio_plus = out.computed_plus / out.predicted_plus;
    out.ratio_minus = out.computed_minus / out.predicted_minus;
    return out;
}

Real sector_theta(int N, int M) {
    if (N <= M || M < 0) throw DomainError("sector_theta: need N > M >= 0");
    return (M + 2.0) * kPi / (N + 2.0);
}

InstantonAction instanton_action(int N, int M, Complex v) {
    if (N <= M || M < 0) throw DomainError("instanton_action: need N > M >= 0");
    InstantonAction out;
    const Real step = N - M;
    using specfun::gamma;
    Complex gamma_ratio = gamma(Complex((M + 2.0) / (2.0 * step))) /
                          gamma(Complex((N + 2.0) / (2.0 * step)));
    // bracket power with additive phase convention: the phase of
    // e^{-i(M+2)pi} v^{N+2} is tracked before the fractional power
    Real mod = std::pow(std::abs(v), Real(N + 2) / (2.0 * step));
    Real phase = ((N + 2.0) * std::arg(v) - (M + 2.0) * kPi) / (2.0 * step);
    out.value = std::sqrt(kPi) / (N + 2.0) * gamma_ratio * std::polar(mod, phase);
    out.q0 = unit_phase(-kPi / step) * std::pow(v, 1.0 / step);
    // smallest arg v > 0 with the phase a multiple of 2 pi
    out.first_real_angle = (M + 2.0) * kPi / (N + 2.0);
    return out;
}

Complex limit_relation_residual(int M, Complex Lambda,
                                const spectral::LogDetOptions& opt) {
    if (M < 2 || M % 2 != 0) throw DomainError("limit_relation_residual: even M >= 2");
    const Real phi_M = 4.0 * kPi / (M + 2);
    Complex Lam1 = unit_phase(-phi_M) * Lambda;
    Complex Dp = spectral::power_det(M, Parity::Even, Lambda, opt).value;
    Complex Dm = spectral::power_det(M, Parity::Odd, Lambda, opt).value;
    Complex Dp1 = spectral::power_det(M, Parity::Even, Lam1, opt).value;
    Complex Dm1 = spectral::power_det(M, Parity::Odd, Lam1, opt).value;
    Complex rhs = 2.0 * Complex(0.0, 1.0);
    if (M == 2) rhs *= std::exp(Complex(0.0, kPi / 4.0) * Lambda);
    return unit_phase(+phi_M / 4.0) * Dp1 * Dm - unit_phase(-phi_M / 4.0) * Dp * Dm1 -
           rhs;
}

TransitionAudit transition_audit(int N, int M, Real lambda,
                                 const std::vector<Real>& absv_ladder,
                                 const WronskianOptions& opt) {
    const Rational j = exponent_j(N, M);
    if (!(j.to_double() > 1.0))
        throw DomainError("transition_audit: requires j > 1 (2M + 2 > N); "
                          "beyond it the limit interchange is only formal");
    TransitionAudit out;
    const Real phi_N = 4.0 * kPi / (N + 2);
    const Real phi_M = 4.0 * kPi / (M + 2);
    const Complex z = unit_phase(phi_M / 4.0);

    for (Real absv : absv_ladder) {
        Complex v = std::polar(absv, -kPi / (2.0 * j.to_double()));
        ConjugateProblem cp = conjugate_params(N, M, lambda, v);
        auto [Dp, Dm] = det_pair_at(N, M, v, Complex(lambda), opt);
        auto [Dp1, Dm1] = det_pair_at(N, M, cp.v1, cp.lambda1, opt);
        Complex lhs = unit_phase(+phi_N / 4.0) * Dp1 * Dm -
                      unit_phase(-phi_N / 4.0) * Dp * Dm1;

        Complex I_v = actions::action_binomial(1.0, v, N, M).value;
        Complex I_v1 = actions::action_binomial(1.0, cp.v1, N, M).value;
        Complex Lambda = std::pow(v, -2.0 / (M + 2)) * lambda;
        Complex A = coupling_anomaly(N, M, v, Lambda);
        Complex A1 = coupling_anomaly(N, M, cp.v1, cp.Lambda1);
        Complex divisor = std::exp(I_v + I_v1 + A + A1);

        TransitionRow row;
        row.absv = absv;
        row.bracket = lhs / divisor;
        row.target = z * spectral::power_det(M, Parity::Even, cp.Lambda1).value *
                         spectral::power_det(M, Parity::Odd, Lambda).value -
                     spectral::power_det(M, Parity::Even, Lambda).value *
                         spectral::power_det(M, Parity::Odd, cp.Lambda1).value / z;
        row.ratio = row.bracket / row.target;
        out.rows.push_back(row);

        // closed phase identities at this ladder point
        TrinomialMomentum binom(N, M, 1.0, v, 0.0);
        Complex beta = actions::residue(binom);
        out.action_identity_residual = std::max(
            out.action_identity_residual,
            std::abs(I_v + I_v1 - Complex(0.0, phi_N / 2.0) * beta));
        out.z_identity_residual =
            std::max(out.z_identity_residual, std::abs(cp.z - z));
        if (M == 2)
            out.anomaly_identity_residual = std::max(
                out.anomaly_identity_residual,
                std::abs(A + A1 + Complex(0.0, kPi / 4.0) * Lambda));
    }

    // Convergence by ratio-of-differences < 0.6 on |ratio - 1|. In exact
    // arithmetic the bracket equals the target at every ladder point (the
    // two bilinear relations compose with the closed phase identities), so
    // a sequence already at the numerical noise floor also counts.
    if (out.rows.size() >= 3) {
        bool decaying = true, at_floor = true;
        for (std::size_t i = 1; i + 1 < out.rows.size(); ++i) {
            Real d0 = std::abs(out.rows[i].ratio - 1.0);
            Real d1 = std::abs(out.rows[i + 1].ratio - 1.0);
            if (!(d1 < 0.6 * d0)) decaying = false;
        }
        for (const auto& r : out.rows)
            if (!(std::abs(r.ratio - 1.0) < 1e-6)) at_floor = false;
        out.converged = decaying || at_floor;
    }
    return out;
}

Rational phi_over_pi(int deg) { return Rational(4, deg + 2); }

Rational z_phase_in_pi(int N, int M) {
    // phi_N/4 + pi/(2(M+2)j), in units of pi
    Rational j = exponent_j(N, M);
    return Rational(1, N + 2) + Rational(1, 2 * (M + 2)) / j;
}

bool phase_identity_z(int N, int M) {
    return z_phase_in_pi(N, M) == Rational(1, M + 2);
}

bool phase_identity_action(int N, int M) {
    Rational j = exponent_j(N, M);
    if (!j.is_integer()) {
        // I proportional to v^j: the conjugate rotation multiplies by
        // e^{i pi j / j} = -1, so I + I^[1] = 0 and the residue vanishes
        return mod_two(j / j) == Rational(1);
    }
    // logarithmic branch: coefficient identity (2j/(N+2)) (1/j) == phi_N/(2 pi)
    return Rational(2 * j.num, N + 2) / j == Rational(2, N + 2);
}

bool phase_identity_anomaly(int N, int M) {
    if (M != 2) return true;  // no anomaly factor
    Rational j = exponent_j(N, M);
    return Rational(N + 2, 8 * (N - 2)) / j == Rational(1, 4);
}

} // namespace wkbdet::functional
