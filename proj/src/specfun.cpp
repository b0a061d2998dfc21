#include "wkbdet/specfun.hpp"

#include <cmath>

namespace wkbdet::specfun {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458;

// log(sin(z)) without overflow for large |Im z| and with a branch that keeps
// log_gamma continuous across the reflection strip.
Complex sinln(Complex z) {
    const Complex I(0.0, 1.0);
    if (z.imag() > 0.0)
        return -I * (kPi / 2) - kLn2 - I * z + std::log(std::exp(2.0 * I * z) - 1.0);
    return -I * (kPi / 2) - kLn2 + I * z + std::log(1.0 - std::exp(-2.0 * I * z));
}

bool near_nonpositive_integer(Complex z) {
    if (z.imag() != 0.0) return false;
    double r = z.real();
    return r <= 0.0 && std::abs(r - std::round(r)) < 1e-14;
}

} // namespace

Complex log_gamma(Complex z) {
    if (near_nonpositive_integer(z))
        throw DomainError("gamma: pole at non-positive integer");
    if (z.real() <= 0.0)
        return std::log(Complex(kPi)) - sinln(kPi * z) - log_gamma(1.0 - z);

    // Lanczos approximation, g = 607/128, 14 terms.
    static const double coef[14] = {
        57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
        -0.491913816097620199,   3.39946499848118887e-5,  4.65236289270485756e-5,
        -9.83744753048795646e-5, 1.58088703224912494e-4,  -2.10264441724104883e-4,
        2.17439618115212643e-4,  -1.64318106536763890e-4, 8.44182239838527433e-5,
        -2.61908384015814087e-5, 3.68991826595316234e-6};

    Complex x = z;
    Complex y = z;
    Complex tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    Complex ser = 0.999999999999997092;
    for (double c : coef) {
        y += 1.0;
        ser += c / y;
    }
    return tmp + std::log(2.5066282746310005 * ser / x);
}

Complex gamma(Complex z) { return std::exp(log_gamma(z)); }

Modulus Modulus::from_k(Complex k) {
    if (k.imag() == 0.0) {
        double kr = k.real();
        if (kr < 0.0 || kr > 1.0)
            throw DomainError("Modulus: real k must lie in [0, 1]");
        return Modulus(k, std::sqrt(std::max(0.0, 1.0 - kr * kr)));
    }
    if (k.real() == 0.0) {
        // Pure-imaginary modulus: k' = sqrt(1 + |k|^2) real.
        double ki = k.imag();
        return Modulus(k, std::sqrt(1.0 + ki * ki));
    }
    throw DomainError("Modulus: general complex modulus is outside the toolbox");
}

Modulus Modulus::from_kprime(Real kprime) {
    if (kprime <= 0.0 || kprime > 1.0)
        throw DomainError("Modulus: real k' must lie in (0, 1]");
    return Modulus(std::sqrt(std::max(0.0, 1.0 - kprime * kprime)), kprime);
}

namespace {

struct AgmResult {
    double K;
    double E;
};

// AGM for real k in [0,1): K = pi/(2*a_n); E from the accumulated c_n sums.
// Carried in long double on (k, k') so values near k = 1 keep full double
// accuracy when the caller supplies k' directly.
AgmResult agm_KE(double k, double kprime) {
    long double a = 1.0L, b = kprime, c = k;
    long double csum = 0.5L * c * c;
    long double pow2 = 1.0L;
    for (int n = 0; n < 80; ++n) {
        long double an = 0.5L * (a + b);
        long double bn = std::sqrt(a * b);
        c = 0.5L * (a - b);
        pow2 *= 2.0L;
        csum += 0.5L * pow2 * c * c;
        a = an;
        b = bn;
        if (std::abs(double(c)) < 1e-19 * double(a)) break;
    }
    long double K = (long double)kPi / (2.0L * a);
    long double E = K * (1.0L - csum);
    return {double(K), double(E)};
}

AgmResult agm_KE(const Modulus& m) {
    return agm_KE(m.k().real(), m.kprime().real());
}

double real_k_or_throw(const Modulus& m, const char* who) {
    if (m.is_imaginary())
        throw DomainError(std::string(who) + ": pure-imaginary modulus must go through the imaginary-modulus transformation");
    return m.k().real();
}

} // namespace

Real ellip_K(const Modulus& m) {
    if (m.is_imaginary()) {
        double kappa = std::abs(m.k().imag());   // k = i*kt/kt'  =>  kt = kappa/sqrt(1+kappa^2)
        double kt = kappa / std::sqrt(1.0 + kappa * kappa);
        return imaginary_modulus_transform(kt).K;
    }
    double k = real_k_or_throw(m, "ellip_K");
    if (k >= 1.0) throw DomainError("ellip_K: divergent at k = 1");
    return agm_KE(m).K;
}

Real ellip_E(const Modulus& m) {
    if (m.is_imaginary()) {
        double kappa = std::abs(m.k().imag());
        double kt = kappa / std::sqrt(1.0 + kappa * kappa);
        return imaginary_modulus_transform(kt).E;
    }
    double k = real_k_or_throw(m, "ellip_E");
    if (k == 1.0) return 1.0;
    return agm_KE(m).E;
}

Real dK_dk(const Modulus& m) {
    double k = real_k_or_throw(m, "dK_dk");
    if (k <= 0.0 || k >= 1.0) throw DomainError("dK_dk: requires k in (0, 1)");
    AgmResult r = agm_KE(m);
    double kp2 = m.kprime().real() * m.kprime().real();
    return r.E / (k * kp2) - r.K / k;
}

KEPair K_E_near_unit_modulus(Real kprime, int order) {
    if (kprime <= 0.0 || kprime > 0.3)
        throw DomainError("K_E_near_unit_modulus: requires 0 < k' <= 0.3");
    if (order < 0 || order > 2)
        throw DomainError("K_E_near_unit_modulus: implemented orders are 0..2");
    const double L = std::log(4.0 / kprime);
    const double p2 = kprime * kprime;
    double K = L;
    if (order >= 1) K += 0.25 * (L - 1.0) * p2;
    double E = 1.0;
    if (order >= 1) E += 0.5 * (L - 0.5) * p2;
    if (order >= 2) E += (3.0 / 16.0) * (L - 13.0 / 12.0) * p2 * p2;
    return {K, E};
}

KEPair landen_transform(Real kdot_prime) {
    if (kdot_prime <= 0.0 || kdot_prime > 1.0)
        throw DomainError("landen_transform: requires k-dot' in (0, 1]");
    double kdot = std::sqrt(std::max(0.0, 1.0 - kdot_prime * kdot_prime));
    AgmResult r = agm_KE(kdot, kdot_prime);
    KEPair out;
    out.K = 0.5 * (1.0 + kdot_prime) * r.K;
    out.E = (r.E + kdot_prime * r.K) / (1.0 + kdot_prime);
    return out;
}

KEPair imaginary_modulus_transform(Real ktilde) {
    if (ktilde < 0.0 || ktilde >= 1.0)
        throw DomainError("imaginary_modulus_transform: requires real k-tilde in [0, 1)");
    double ktp = std::sqrt(1.0 - ktilde * ktilde);
    AgmResult r = agm_KE(ktilde, ktp);
    return {ktp * r.K, r.E / ktp};
}

} // namespace wkbdet::specfun
