#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wkbdet/spectral.hpp"

using namespace wkbdet;
using namespace wkbdet::spectral;

namespace {

// Test-local oracle: fixed-step RK4 shooting with Richardson extrapolation
// in the step size, fully independent of the production integrator.
double rk4_boundary(double E, Parity p, double h) {
    const double R = 9.0;
    auto W = [&](double q) { return q * q * q * q - E; };
    double Pi = std::sqrt(W(R));
    double y0 = 1.0, y1 = -Pi - (4.0 * R * R * R) / (4.0 * W(R));
    long steps = std::lround(R / h);
    double q = R;
    for (long i = 0; i < steps; ++i) {
        auto f = [&](double qq, double a, double b, double& da, double& db) {
            da = b;
            db = W(qq) * a;
        };
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        f(q, y0, y1, k1a, k1b);
        f(q - 0.5 * h, y0 - 0.5 * h * k1a, y1 - 0.5 * h * k1b, k2a, k2b);
        f(q - 0.5 * h, y0 - 0.5 * h * k2a, y1 - 0.5 * h * k2b, k3a, k3b);
        f(q - h, y0 - h * k3a, y1 - h * k3b, k4a, k4b);
        y0 -= h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        y1 -= h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        q -= h;
        double mag = std::max(std::abs(y0), std::abs(y1));
        if (mag > 1e100) {
            y0 /= mag;
            y1 /= mag;
        }
    }
    return p == Parity::Even ? y1 : y0;
}

double rk4_level(double lo, double hi, Parity p, double h) {
    double flo = rk4_boundary(lo, p, h);
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = rk4_boundary(mid, p, h);
        if (flo * fm <= 0.0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("harmonic spectrum: sqrt(v)(4k+1) and sqrt(v)(4k+3)") {
    const double v = 2.25;
    TrinomialMomentum m(2, 0, v, 0.0, 0.0);
    EigenOptions opt;
    opt.model_extension = 256;
    auto even = eigenvalues(m, Parity::Even, 16, opt);
    auto odd = eigenvalues(m, Parity::Odd, 16, opt);
    for (int k = 0; k < 16; ++k) {
        CHECK(std::abs(even.eigenvalues[k] - std::sqrt(v) * (4.0 * k + 1.0)) < 1e-9);
        CHECK(std::abs(odd.eigenvalues[k] - std::sqrt(v) * (4.0 * k + 3.0)) < 1e-9);
    }
    CHECK(even.growth_exponent == doctest::Approx(1.0));
}

TEST_CASE("quartic ground states against the Richardson RK4 oracle") {
    TrinomialMomentum m(4, 0, 1.0, 0.0, 0.0);
    EigenOptions opt;
    opt.model_extension = 256;
    auto even = eigenvalues(m, Parity::Even, 2, opt);
    auto odd = eigenvalues(m, Parity::Odd, 2, opt);

    double l0_h = rk4_level(0.9, 1.2, Parity::Even, 1e-3);
    double l0_h2 = rk4_level(0.9, 1.2, Parity::Even, 5e-4);
    double l0_rich = (16.0 * l0_h2 - l0_h) / 15.0;
    CHECK(std::abs(even.eigenvalues[0] - l0_rich) < 1e-9);

    double l1_h = rk4_level(3.5, 4.1, Parity::Odd, 1e-3);
    double l1_h2 = rk4_level(3.5, 4.1, Parity::Odd, 5e-4);
    double l1_rich = (16.0 * l1_h2 - l1_h) / 15.0;
    CHECK(std::abs(odd.eigenvalues[0] - l1_rich) < 1e-9);

    CHECK(even.eigenvalues[0] == doctest::Approx(1.0603621).epsilon(1e-7));
    CHECK(odd.eigenvalues[0] == doctest::Approx(3.7996730).epsilon(1e-7));
}

TEST_CASE("spectrum invariants: ordering, positivity, tail self-check") {
    TrinomialMomentum m(4, 2, 1.0, 1.5, 0.0);
    EigenOptions opt;
    opt.model_extension = 256;
    auto spec = eigenvalues(m, Parity::Even, 24, opt);
    REQUIRE(spec.count == 24);
    CHECK(spec.eigenvalues.front() > 0.0);
    for (int k = 1; k < spec.count; ++k)
        CHECK(spec.eigenvalues[k] > spec.eigenvalues[k - 1]);
    CHECK(spec.self_check_error() < 1e-3);
    CHECK(spec.growth_exponent == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("eigenvalue convergence under integrator-tolerance tightening") {
    TrinomialMomentum m(4, 0, 1.0, 0.0, 0.0);
    EigenOptions loose, tight;
    loose.tol = 1e-9;
    loose.ode_rtol = 1e-10;
    loose.model_extension = 64;
    tight = loose;
    tight.ode_rtol = loose.ode_rtol / 16.0;
    auto a = eigenvalues(m, Parity::Even, 4, loose);
    auto b = eigenvalues(m, Parity::Even, 4, tight);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(a.eigenvalues[k] - b.eigenvalues[k]) < loose.tol / 4.0);
}

TEST_CASE("zeta at s = 0: scaling-law closed value") {
    TrinomialMomentum q(4, 2, 1.0, 2.0, 0.0);
    CHECK(std::abs(zeta(q, Parity::Even, 0.0, 1.7) - Complex(0.25)) < 1e-15);
    CHECK(std::abs(zeta(q, Parity::Odd, 0.0, 0.3) - Complex(-0.25)) < 1e-15);
    double v = 4.0, lam = 1.2;
    TrinomialMomentum h(2, 0, v, 0.0, 0.0);
    Complex expected = -lam / (2.0 * std::sqrt(v)) / 2.0 + 0.25;
    CHECK(std::abs(zeta(h, Parity::Even, 0.0, lam) - expected) < 1e-14);
}

TEST_CASE("zeta at s = 2 for the harmonic sector: trigamma oracle") {
    auto trigamma = [](double x) {
        double s = 0;
        while (x < 25) {
            s += 1.0 / (x * x);
            x += 1;
        }
        double inv = 1.0 / x, i2 = inv * inv;
        return s + inv + 0.5 * i2 + i2 * inv * (1.0 / 6.0 - i2 * (1.0 / 30.0 - i2 / 42.0));
    };
    TrinomialMomentum h(2, 0, 1.0, 0.0, 0.0);
    for (double lam : {0.0, 0.8, 3.5}) {
        Complex z = zeta(h, Parity::Odd, 2.0, lam);
        CHECK(std::abs(z.real() - trigamma((3.0 + lam) / 4.0) / 16.0) < 1e-12);
        Complex ze = zeta(h, Parity::Even, 2.0, lam);
        CHECK(std::abs(ze.real() - trigamma((1.0 + lam) / 4.0) / 16.0) < 5e-12);
    }
}

TEST_CASE("zeta at s = 1 for the harmonic sector: digamma (Hurwitz-style) oracle") {
    auto digamma = [](double x) {
        double s = 0;
        while (x < 25) {
            s -= 1.0 / x;
            x += 1;
        }
        double inv = 1.0 / x, i2 = inv * inv;
        return s + std::log(x) - 0.5 * inv - i2 / 12.0 + i2 * i2 / 120.0;
    };
    TrinomialMomentum h(2, 0, 1.0, 0.0, 0.0);
    for (double lam : {0.0, 1.0, 4.0}) {
        Complex z = zeta(h, Parity::Odd, 1.0, lam);
        double ref = -0.25 * digamma((3.0 + lam) / 4.0) - 0.5 * std::log(2.0);
        CHECK(std::abs(z.real() - ref) < 1e-8);
    }
}

TEST_CASE("zeta: direct summation above the abscissa, error below it") {
    TrinomialMomentum q(4, 0, 1.0, 0.0, 0.0);
    auto spec = spectrum_cached(q, Parity::Even, 64);
    Complex z = zeta(*spec, 1.5, 0.5);
    double partial = 0.0;
    for (double lk : spec->eigenvalues) partial += std::pow(lk + 0.5, -1.5);
    CHECK(z.real() > partial);
    CHECK(z.real() - partial < std::pow(spec->eigenvalues.back(), -0.5) * 3.0);
    CHECK_THROWS_AS((void)zeta(*spec, 0.7, 0.0), DomainError);
}

TEST_CASE("zeta tail: enlarging the explicit count moves Z(1) below budget") {
    TrinomialMomentum q(4, 0, 1.0, 0.0, 0.0);
    Complex a = zeta(q, Parity::Even, 1.0, 0.7, 96);
    Complex b = zeta(q, Parity::Even, 1.0, 0.7, 144);
    CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("domain checks") {
    CHECK_THROWS_AS((void)eigenvalues(TrinomialMomentum(4, 2, 1.0, Complex(0, 1), 0.0),
                                      Parity::Even, 4),
                    DomainError);
    CHECK_THROWS_AS((void)eigenvalues(TrinomialMomentum(4, 2, 1.0, 1.0, 0.5),
                                      Parity::Even, 4),
                    DomainError);
    CHECK_THROWS_AS((void)eigenvalues(TrinomialMomentum(4, 2, 1.0, 1.0, 0.0),
                                      Parity::Even, 0),
                    DomainError);
}
