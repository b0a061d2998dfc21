#include "wkbdet/actions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wkbdet/specfun.hpp"

namespace wkbdet::actions {

namespace {

// Generalized binomial coefficient C(alpha, n) for complex alpha.
Complex binom(Complex alpha, int n) {
    Complex p = 1.0;
    for (int k = 0; k < n; ++k) p *= (alpha - Real(k)) / Real(k + 1);
    return p;
}

// Integer power by repeated multiplication; 0^0 = 1.
Complex cpow_int(Complex z, int n) {
    Complex p = 1.0;
    for (int k = 0; k < n; ++k) p *= z;
    return p;
}

Real harmonic_number(int j) {
    Real h = 0.0;
    for (int m = 1; m <= j; ++m) h += 1.0 / m;
    return h;
}

Real odd_harmonic_number(int jm1) {
    Real h = 0.0;
    for (int m = 1; m <= jm1; ++m) h += 1.0 / (2.0 * m - 1.0);
    return h;
}

} // namespace

std::vector<BetaTerm> beta_ladder(const TrinomialMomentum& m, Complex s, int depth) {
    m.validate();
    if (depth < 0) throw DomainError("beta_ladder: depth must be >= 0");
    const Complex alpha = 0.5 - s;
    const int step = m.N - m.M;
    std::map<int, Complex, std::greater<int>> acc;  // rho -> coefficient
    const Complex u_pow = std::pow(m.u, alpha);
    // Expansion of (1 + (v/u) q^{M-N} + (lambda/u) q^{-N})^alpha: the term
    // (a, b) lowers the exponent by a(N-M) + bN.
    for (int a = 0; a * step <= depth; ++a) {
        for (int b = 0; a * step + b * m.N <= depth; ++b) {
            int drop = a * step + b * m.N;
            Complex c = binom(alpha, a + b) * binom(Complex(Real(a + b)), a) *
                        cpow_int(m.v / m.u, a) * cpow_int(m.lambda / m.u, b) * u_pow;
            acc[m.N / 2 - drop] += c;
        }
    }
    std::vector<BetaTerm> out;
    out.reserve(acc.size());
    for (auto& [rho, c] : acc) out.push_back({rho, c});
    return out;
}

Complex beta_coeff(const TrinomialMomentum& m, int rho, Complex s, int depth) {
    if (m.N / 2 - rho > depth)
        throw NumericError("beta_coeff: requested rho lies below the truncation depth");
    if (rho > m.N / 2) return 0.0;
    for (const auto& t : beta_ladder(m, s, m.N / 2 - rho))
        if (t.rho == rho) return t.coeff;
    return 0.0;
}

Complex residue(const TrinomialMomentum& m) {
    return beta_coeff(m, -1, 0.0, m.N / 2 + 1);
}

RegularizedAction action_binomial(Complex u, Complex v, int N, int M) {
    if (N <= M || M < 0 || N % 2 != 0 || M % 2 != 0)
        throw DomainError("action_binomial: need even N > M >= 0");
    if (u == Complex(0.0)) throw DomainError("action_binomial: u must be nonzero");
    RegularizedAction out;
    out.method = ActionMethod::BinomialClosed;
    if (v == Complex(0.0)) {
        // Pure power momentum: the regularized integral carries no finite part.
        out.value = 0.0;
        out.residue = 0.0;
        return out;
    }
    const Rational j = exponent_j(N, M);
    const Real jd = j.to_double();
    if (j.is_integer()) {
        const int ji = int(j.num);
        // residue of the binomial momentum
        Complex beta = binom(Complex(0.5), ji) * std::pow(u, 0.5 - jd) * std::pow(v, jd);
        Complex bracket = std::log(v) - harmonic_number(ji) -
                          (2.0 * M / Real(N)) *
                              (std::log(Complex(2.0)) + 0.5 * std::log(u) -
                               odd_harmonic_number(ji - 1));
        out.value = -(2.0 * jd / Real(N + 2)) * beta * bracket;
        out.residue = beta;
        out.log_branch = true;
        return out;
    }
    using specfun::gamma;
    out.value = gamma(Complex(jd - 0.5)) * gamma(Complex(-jd)) /
                (Real(N - M) * gamma(Complex(-0.5))) * std::pow(u, 0.5 - jd) *
                std::pow(v, jd);
    out.residue = 0.0;
    return out;
}

Complex perfect_square_family_value(int M, int L, Real w, Complex s) {
    if (M <= L || L < 0) throw DomainError("perfect_square_family_value: need M > L >= 0");
    if (w <= 0.0) throw DomainError("perfect_square_family_value: need w > 0");
    const Real dm = M, dl = L, step = Real(M - L);
    const Complex one_minus_2s = 1.0 - 2.0 * s;
    const Complex arg_den = 2.0 * s - 1.0;
    // A pole of the denominator Gamma with a finite numerator kills the value.
    auto is_pole = [](Complex z) {
        return z.imag() == 0.0 && z.real() <= 0.0 &&
               std::abs(z.real() - std::round(z.real())) < 1e-13;
    };
    Complex num1 = (dl * one_minus_2s + 1.0) / step;
    Complex num2 = -(dm * one_minus_2s + 1.0) / step;
    if (is_pole(num1) || is_pole(num2))
        throw DomainError("perfect_square_family_value: numerator Gamma pole");
    if (is_pole(arg_den)) return 0.0;
    using specfun::gamma;
    return gamma(num1) * gamma(num2) / (step * gamma(arg_den)) *
           std::pow(Complex(w), (dm * one_minus_2s + 1.0) / step);
}

RegularizedAction action_perfect_square(const TrinomialMomentum& m) {
    m.validate();
    if ((m.N / 2) % 2 != 0)
        throw DomainError("action_perfect_square: N/2 must be even");
    if (m.M != m.N / 2)
        throw DomainError("action_perfect_square: momentum is not of the (q^{N/2} + sqrt(lambda))^2 form");
    Complex disc = m.v * m.v - 4.0 * m.u * m.lambda;
    if (std::abs(disc) > 1e-10 * (std::abs(m.v * m.v) + std::abs(4.0 * m.u * m.lambda)))
        throw DomainError("action_perfect_square: momentum is not a perfect square");
    RegularizedAction out;
    out.method = ActionMethod::PerfectSquare;
    out.value = 0.0;
    out.residue = residue(m);
    return out;
}

RegularizedAction action_quartic(Real v, Real lambda) {
    if (v < 0.0 || lambda < 0.0)
        throw DomainError("action_quartic: need v >= 0 and lambda >= 0");
    if (v == 0.0 && lambda == 0.0)
        throw DomainError("action_quartic: v and lambda cannot both vanish");
    RegularizedAction out;
    out.method = ActionMethod::QuarticElliptic;
    out.residue = 0.0;
    const Real sl = std::sqrt(lambda);
    if (lambda == 0.0) {
        out.value = -std::pow(v, 1.5) / 3.0;  // E(1) = 1
        return out;
    }
    using namespace specfun;
    if (v >= 2.0 * sl) {
        Real k = std::sqrt((v - 2.0 * sl) / (v + 2.0 * sl));
        Modulus mod = Modulus::from_k(Complex(k));
        out.value = std::sqrt(v + 2.0 * sl) / 3.0 *
                    (2.0 * sl * ellip_K(mod) - v * ellip_E(mod));
    } else {
        // continuation across v = 2 sqrt(lambda): already expressed through
        // the real modulus k-tilde
        Real kt = std::sqrt(2.0 * sl - v) / (2.0 * std::pow(lambda, 0.25));
        Modulus mod = Modulus::from_k(Complex(kt));
        out.value = std::pow(lambda, 0.25) / 3.0 *
                    ((2.0 * sl + v) * ellip_K(mod) - 2.0 * v * ellip_E(mod));
    }
    return out;
}

Complex contour_primitive_quartic(Real v, Real lambda) {
    if (!(lambda > 0.0) || v < 2.0 * std::sqrt(lambda))
        throw DomainError("contour_primitive_quartic: requires v >= 2 sqrt(lambda) > 0");
    const Real disc = std::sqrt(v * v - 4.0 * lambda);
    const Real qp = std::sqrt(0.5 * (v + disc));
    const Real qm = std::sqrt(0.5 * (v - disc));
    const Real kdot_prime = qm / qp;
    const Real kdot = std::sqrt(std::max(0.0, 1.0 - kdot_prime * kdot_prime));
    using namespace specfun;
    Modulus mod = Modulus::from_k(Complex(kdot));
    return -qp / 3.0 * (v * ellip_E(mod) - 2.0 * qm * qm * ellip_K(mod));
}

RegularizedAction action_large_v(int N, int M, Real lambda, Real v) {
    if (N <= M || M < 2 || N % 2 != 0 || M % 2 != 0)
        throw DomainError("action_large_v: need even N > M >= 2");
    if (v <= 0.0) throw DomainError("action_large_v: need v > 0");
    if (lambda < 0.0) throw DomainError("action_large_v: need lambda >= 0");
    RegularizedAction zero_e = action_binomial(1.0, v, N, M);           // q^N + v q^M
    RegularizedAction inner = action_binomial(v, lambda, M, 0);         // v q^M + lambda
    Complex corr = 0.0;
    if (M == 2)
        corr = Real(N) / (4.0 * Real(N - 2)) / std::sqrt(v) * lambda *
               (std::log(v) + 2.0 * std::log(2.0));
    RegularizedAction out;
    out.method = ActionMethod::Asymptotic;
    out.value = zero_e.value + inner.value + corr;
    out.residue = residue(TrinomialMomentum(N, M, 1.0, v, lambda));
    out.error_estimate = lambda * lambda * std::log(2.0 + v) * std::pow(v, -1.5);
    return out;
}

Complex LargeVSeries::eval(Real v) const {
    Complex s = 0.0;
    const Real lv = std::log(v);
    for (const auto& t : terms) s += std::pow(v, t.power) * (t.coeff + t.log_coeff * lv);
    return s;
}

LargeVSeries quartic_large_v_expansion(Real v, Real lambda, int order) {
    if (order < 0 || order > 2)
        throw DomainError("quartic_large_v_expansion: implemented depth is 2");
    if (!(v > 2.0 * std::sqrt(lambda)))
        throw DomainError("quartic_large_v_expansion: requires v > 2 sqrt(lambda)");
    LargeVSeries s;
    s.terms.push_back({1.5, -1.0 / 3.0, 0.0});
    if (order >= 1) s.terms.push_back({0.5, 0.0, 0.0});  // both v^{1/2} slots cancel
    if (order >= 2) {
        // -1/4 lambda v^{-1/2} (log(lambda/v^2) - 4 log 2 - 1)
        Complex c = -0.25 * lambda * (std::log(lambda) - 4.0 * std::log(2.0) - 1.0);
        Complex cl = 0.5 * lambda;
        s.terms.push_back({-0.5, c, cl});
    }
    s.first_omitted_power = order >= 2 ? -1.5 : (order == 1 ? -0.5 : 0.5);
    return s;
}

std::vector<LadderExponent> large_lambda_ladder(int N, int M, Real cutoff) {
    std::vector<LadderExponent> out;
    const int m_levels = (N >= 4) ? 1 : 2;
    for (int a = 0;; ++a) {
        Rational alpha = Rational(N + 2, 2 * N) + Rational(a * (M - N), N);
        if (alpha.to_double() < cutoff) break;
        bool with_log = alpha.is_integer() && alpha.num >= 0 && alpha.num < m_levels;
        out.push_back({alpha, with_log});
        if (a > 256) throw NumericError("large_lambda_ladder: runaway ladder");
    }
    return out;
}

} // namespace wkbdet::actions
