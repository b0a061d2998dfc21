#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "wkbdet/actions.hpp"
#include "wkbdet/quadrature.hpp"
#include "wkbdet/specfun.hpp"

using namespace wkbdet;
using namespace wkbdet::actions;

namespace {
const double g14 = 3.6256099082219083;  // Gamma(1/4), oracle-checked in test_specfun

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}
} // namespace

TEST_CASE("residue: quartic trinomial momentum has a null residue") {
    for (double v : {0.0, 1.0, 5.0}) {
        for (double lam : {0.0, 0.5, 3.0}) {
            TrinomialMomentum m(4, 2, 1.0, v, lam);
            CHECK(std::abs(residue(m)) == 0.0);
        }
    }
    // all even momenta with N = 0 mod 4
    CHECK(std::abs(residue(TrinomialMomentum(8, 2, 1.0, 2.0, 1.0))) == 0.0);
}

TEST_CASE("residue: (q^M + Lambda)^(1/2) carries delta_{M,2} Lambda / 2") {
    Complex Lam(0.7, 0.2);
    TrinomialMomentum m2(2, 0, 1.0, 0.0, Lam);
    CHECK(std::abs(residue(m2) - Lam / 2.0) < 1e-15);
    TrinomialMomentum m4(4, 0, 1.0, 0.0, Lam);
    CHECK(std::abs(residue(m4)) == 0.0);
    TrinomialMomentum m6(6, 0, 1.0, 0.0, Lam);
    CHECK(std::abs(residue(m6)) == 0.0);
}

TEST_CASE("residue: integer-j binomial matches the factorial closed form") {
    auto check = [](int N, int M, Complex u, Complex v) {
        Rational j = exponent_j(N, M);
        REQUIRE(j.is_integer());
        int ji = int(j.num);
        Complex expected = std::pow(-1.0, ji - 1) * factorial(2 * ji - 2) /
                           (std::pow(2.0, 2 * ji - 1) * factorial(ji - 1) * factorial(ji)) *
                           std::pow(u, 0.5 - ji) * std::pow(v, Real(ji));
        TrinomialMomentum m(N, M, u, v, 0.0);
        CHECK(std::abs(residue(m) - expected) < 1e-14 * std::abs(expected));
        CHECK(std::abs(action_binomial(u, v, N, M).residue - expected) <
              1e-14 * std::abs(expected));
    };
    check(6, 2, 1.0, 3.0);                  // j = 1
    check(6, 4, 2.0, Complex(0.5, 0.3));    // j = 2
    check(2, 0, 1.5, 2.0);                  // j = 1
}

TEST_CASE("beta_coeff: ladder structure and truncation error") {
    TrinomialMomentum m(4, 2, 1.0, 2.0, 3.0);
    // leading coefficient of (V + lambda)^{1/2} is u^{1/2} at rho = N/2
    CHECK(std::abs(beta_coeff(m, 2, 0.0) - 1.0) < 1e-15);
    // next: (1/2) v at rho = 0
    CHECK(std::abs(beta_coeff(m, 0, 0.0) - 1.0) < 1e-15);
    CHECK_THROWS_AS((void)beta_coeff(m, -40, 0.0, 8), NumericError);
}

TEST_CASE("action_binomial: the three reference integrals") {
    // integral (q^4 + v q^2)^{1/2} = -v^{3/2}/3
    for (double v : {1.0, 2.7, 10.0}) {
        auto a = action_binomial(1.0, v, 4, 2);
        CHECK(std::abs(a.value - (-std::pow(v, 1.5) / 3.0)) < 1e-13 * std::pow(v, 1.5));
        CHECK(!a.log_branch);
    }
    // integral (q^4 + lambda)^{1/2} = Gamma(1/4)^2 / (6 sqrt(pi)) lambda^{3/4}
    for (double lam : {0.3, 1.0, 8.0}) {
        auto a = action_binomial(1.0, lam, 4, 0);
        double expected = g14 * g14 / (6.0 * std::sqrt(kPi)) * std::pow(lam, 0.75);
        CHECK(std::abs(a.value - expected) < 1e-13 * expected);
    }
    // integral (w q^2 + lambda)^{1/2} = -(1/4) w^{-1/2} lambda (log lambda - 1)
    for (double w : {1.0, 4.0}) {
        for (double lam : {0.5, 2.0}) {
            auto a = action_binomial(w, lam, 2, 0);
            double expected = -0.25 / std::sqrt(w) * lam * (std::log(lam) - 1.0);
            CHECK(std::abs(a.value - expected) < 1e-13 * std::max(1.0, std::abs(expected)));
            CHECK(a.log_branch);
        }
    }
}

TEST_CASE("action_binomial: scaling covariance, including the integer-j anomaly") {
    // (u, v) -> (u c^{N+2}, v c^{M+2}) leaves the action invariant when
    // j is not an integer; for integer j the value shifts by the residue
    // anomaly -(2/N) beta_{-1}(0) log c.
    {
        int N = 4, M = 2;
        double c = 1.7;
        auto base = action_binomial(1.3, 2.1, N, M);
        auto scaled = action_binomial(1.3 * std::pow(c, N + 2), 2.1 * std::pow(c, M + 2), N, M);
        CHECK(std::abs(scaled.value - base.value) < 1e-13 * std::abs(base.value));
    }
    {
        int N = 6, M = 2;  // j = 1
        double c = 2.2;
        auto base = action_binomial(1.0, 3.0, N, M);
        auto scaled = action_binomial(std::pow(c, N + 2), 3.0 * std::pow(c, M + 2), N, M);
        Complex anomaly = -2.0 / Real(N) * base.residue * std::log(c);
        CHECK(std::abs(scaled.value - (base.value + anomaly)) < 1e-12 * std::abs(base.value));
    }
}

TEST_CASE("perfect squares: even case vanishes identically") {
    // (q^{N/2} + sqrt(lambda))^2 with N/2 even
    for (int N : {4, 8}) {
        double lam = 2.25;
        TrinomialMomentum m(N, N / 2, 1.0, 2.0 * std::sqrt(lam), lam);
        auto a = action_perfect_square(m);
        CHECK(a.value == Complex(0.0));
        CHECK(std::abs(a.residue) == 0.0);
    }
    // N/2 odd falls outside the even setting (odd M already rejected)
    CHECK_THROWS_AS((void)TrinomialMomentum(6, 3, 1.0, 2.0, 1.0), DomainError);
    // quartic boundary v = 2 sqrt(lambda), consistent with the elliptic branch
    CHECK(std::abs(action_quartic(2.0, 1.0).value) < 1e-14);
}

TEST_CASE("perfect-square family value: continuation checked through w-derivatives") {
    // At s = 0.3 the defining integral diverges; its continuation is the
    // Gamma expression, an exact power c * w^0.9. The second w-derivative
    // is a convergent integral and serves as the oracle.
    const Complex s(0.3, 0.0);
    const double w = 1.0;
    Complex P = perfect_square_family_value(2, 0, w, s);
    double expo = (2.0 * (1.0 - 2.0 * s.real()) + 1.0) / 2.0;  // 0.9
    Complex c = P / std::pow(w, expo);
    double second_formula = (c * expo * (expo - 1.0) * std::pow(w, expo - 2.0)).real();
    double second_quad = (1.0 - 2.0 * s.real()) * (-2.0 * s.real()) *
                         integrate_adaptive<double>(
                             [&](double q) { return std::pow(q * q + w, -2.0 * s.real() - 1.0); },
                             0.0, 60.0, 1e-12);
    // tail beyond q = 60 of (q^2+1)^{-1.6}: ~ q^{-3.2}
    second_quad += (1.0 - 2.0 * s.real()) * (-2.0 * s.real()) * std::pow(60.0, -2.2) / 2.2;
    CHECK(std::abs(second_formula - second_quad) < 1e-8);

    // where the integral does converge, compare directly
    for (double sc : {0.9, 1.2}) {
        Complex F = perfect_square_family_value(2, 0, 1.0, Complex(sc));
        double direct = integrate_adaptive<double>(
            [&](double q) { return std::pow((q * q + 1.0), 1.0 - 2.0 * sc); }, 0.0, 400.0,
            1e-12);
        direct += std::pow(400.0, 2.0 * (1.0 - 2.0 * sc) + 1.0) / (2.0 * (2.0 * sc - 1.0) - 1.0);
        CHECK(std::abs(F.real() - direct) < 1e-7);
    }

    // s = 0 with even exponents: the denominator pole kills the value
    CHECK(perfect_square_family_value(2, 0, 3.0, 0.0) == Complex(0.0));
}

TEST_CASE("action_quartic: special lines") {
    for (double v : {0.5, 1.0, 6.0})
        CHECK(std::abs(action_quartic(v, 0.0).value - (-std::pow(v, 1.5) / 3.0)) < 1e-14 * std::pow(v, 1.5));
    for (double lam : {0.4, 1.0, 7.3}) {
        double expected = g14 * g14 / (6.0 * std::sqrt(kPi)) * std::pow(lam, 0.75);
        CHECK(std::abs(action_quartic(0.0, lam).value - expected) < 1e-12 * expected);
    }
    for (double lam : {0.25, 1.0, 4.0})
        CHECK(std::abs(action_quartic(2.0 * std::sqrt(lam), lam).value) < 1e-13);
    CHECK_THROWS_AS((void)action_quartic(0.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)action_quartic(-1.0, 1.0), DomainError);
}

TEST_CASE("action_quartic: branch agreement across v = 2 sqrt(lambda)") {
    const double lam = 1.0;
    // both expressions vanish at the junction and join smoothly: the even
    // part of I(2 +- d) cancels to O(d^2)
    for (double d : {1e-3, 1e-5}) {
        Complex up = action_quartic(2.0 + d, lam).value;
        Complex dn = action_quartic(2.0 - d, lam).value;
        CHECK(std::abs(up + dn) < 10.0 * d * d + 1e-12);
    }
}

TEST_CASE("contour primitive equals the canonical quartic action") {
    for (auto [v, lam] : {std::pair{5.0, 0.5}, {3.0, 2.0}, {2.00001, 1.0}}) {
        Complex ihat = contour_primitive_quartic(v, lam);
        Complex i = action_quartic(v, lam).value;
        CHECK(std::abs(ihat - i) < 1e-12 * std::max(1.0, std::abs(i)));
    }
    // lambda -> 0: q_- -> 0 and the primitive tends to -v^{3/2}/3
    CHECK(std::abs(contour_primitive_quartic(2.0, 1e-12) - Complex(-std::pow(2.0, 1.5) / 3.0)) < 1e-5);
    // i q_+ and i q_- are roots of q^4 + v q^2 + lambda
    {
        double v = 5.0, lam = 0.5;
        double disc = std::sqrt(v * v - 4.0 * lam);
        for (double s : {+1.0, -1.0}) {
            Complex q(0.0, std::sqrt(0.5 * (v + s * disc)));
            Complex val = std::pow(q, 4) + v * q * q + lam;
            CHECK(std::abs(val) < 1e-12);
        }
    }
    CHECK_THROWS_AS((void)contour_primitive_quartic(1.0, 1.0), DomainError);
}

TEST_CASE("action_large_v: quartic case collapses to the two-term law") {
    for (double v : {10.0, 50.0}) {
        double lam = 1.3;
        auto a = action_large_v(4, 2, lam, v);
        double expected = -std::pow(v, 1.5) / 3.0 -
                          0.25 * lam / std::sqrt(v) *
                              (std::log(lam / (v * v)) - 4.0 * std::log(2.0) - 1.0);
        CHECK(std::abs(a.value - expected) < 1e-12 * std::abs(expected));
    }
    // M != 2: no logarithmic correction term
    {
        double v = 20.0, lam = 0.9;
        auto a = action_large_v(6, 4, lam, v);
        Complex two_terms = action_binomial(1.0, v, 6, 4).value +
                            action_binomial(v, lam, 4, 0).value;
        CHECK(std::abs(a.value - two_terms) == 0.0);
    }
}

TEST_CASE("action_large_v: deviation from the exact quartic inside the stated remainder") {
    // The remainder of the two-term law is bounded by O(v^{-3/2} log v); for
    // the quartic the v^{-3/2} coefficient cancels as well and the measured
    // decay is one full order faster (slope about -5/2).
    const double lam = 1.0;
    std::vector<double> lv, ld;
    for (double v : {50.0, 100.0, 200.0}) {
        double diff = std::abs(action_quartic(v, lam).value - action_large_v(4, 2, lam, v).value);
        CHECK(diff < std::pow(v, -1.5) * std::log(v));  // stated bound
        lv.push_back(std::log(v));
        ld.push_back(std::log(diff / std::log(v)));
    }
    double slope = (ld.back() - ld.front()) / (lv.back() - lv.front());
    CHECK(slope < -1.4);                       // decays at least at the stated rate
    CHECK(slope == doctest::Approx(-2.5).epsilon(0.08));  // measured order
}

TEST_CASE("quartic_large_v_expansion: structure and numeric remainder") {
    const double v = 100.0, lam = 1.0;
    auto s = quartic_large_v_expansion(v, lam, 2);
    REQUIRE(s.terms.size() == 3);
    CHECK(s.terms[0].power == 1.5);
    CHECK(std::abs(s.terms[0].coeff - Complex(-1.0 / 3.0)) < 1e-15);
    // no v^{1/2} and no v^{1/2} log v
    CHECK(s.terms[1].power == 0.5);
    CHECK(std::abs(s.terms[1].coeff) == 0.0);
    CHECK(std::abs(s.terms[1].log_coeff) == 0.0);
    // the two leading orders reproduce the asymptotic law
    CHECK(std::abs(s.eval(v) - action_large_v(4, 2, lam, v).value) < 1e-13 * std::abs(s.eval(v)));
    // remainder against the exact value is below the first omitted term
    double diff = std::abs(s.eval(v) - action_quartic(v, lam).value);
    CHECK(diff < std::pow(v, -1.5) * std::log(v));
    CHECK_THROWS_AS((void)quartic_large_v_expansion(100.0, 1.0, 5), DomainError);
    CHECK_THROWS_AS((void)quartic_large_v_expansion(1.0, 1.0, 2), DomainError);
}
