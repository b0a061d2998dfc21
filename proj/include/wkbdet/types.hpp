#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace wkbdet {

using Real    = double;
using Complex = std::complex<double>;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;

// Thrown when inputs violate an operation's stated domain.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an algorithm cannot reach its accuracy target.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a complex-v evaluation is requested outside the admissible
// sector |arg v| < Theta(N, M).
struct SectorError : std::runtime_error {
    explicit SectorError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Parity { Even, Odd };

inline const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }
inline int parity_sign(Parity p) { return p == Parity::Even ? +1 : -1; }

// Classical data (N, M, u, v, lambda) for the momentum-squared
// Pi(q)^2 = u q^N + v q^M + lambda, with N > M >= 0 both even.
// Pi itself is the branch positive on the positive real q-axis for
// positive parameters (continued from there otherwise).
struct TrinomialMomentum {
    int     N = 4;
    int     M = 2;
    Complex u = 1.0;
    Complex v = 0.0;
    Complex lambda = 0.0;

    TrinomialMomentum() = default;
    TrinomialMomentum(int N_, int M_, Complex u_, Complex v_, Complex lambda_)
        : N(N_), M(M_), u(u_), v(v_), lambda(lambda_) {
        validate();
    }

    void validate() const {
        if (N < 2 || N % 2 != 0) throw DomainError("TrinomialMomentum: N must be even and >= 2");
        if (M < 0 || M % 2 != 0) throw DomainError("TrinomialMomentum: M must be even and >= 0");
        if (M >= N) throw DomainError("TrinomialMomentum: require M < N");
        if (u == Complex(0.0)) throw DomainError("TrinomialMomentum: leading coefficient u must be nonzero");
    }

    // Exponent j = (N+2) / (2(N-M)); always > 1/2.
    double j() const { return double(N + 2) / double(2 * (N - M)); }

    Complex momentum_sq(Complex q) const {
        return u * std::pow(q, N) + v * std::pow(q, M) + lambda;
    }
    Complex momentum_sq_d1(Complex q) const {
        return u * Real(N) * std::pow(q, N - 1) + v * Real(M) * (M > 0 ? std::pow(q, M - 1) : Complex(0.0));
    }
    Complex momentum_sq_d2(Complex q) const {
        Complex r = u * Real(N) * Real(N - 1) * std::pow(q, N - 2);
        if (M >= 2) r += v * Real(M) * Real(M - 1) * std::pow(q, M - 2);
        return r;
    }

    bool real_nonnegative() const {
        return u.imag() == 0.0 && v.imag() == 0.0 && lambda.imag() == 0.0 &&
               u.real() > 0.0 && v.real() >= 0.0 && lambda.real() >= 0.0;
    }
};

enum class ActionMethod {
    BinomialClosed,
    PerfectSquare,
    QuarticElliptic,
    NumericCanonical,
    Asymptotic,
};

inline const char* to_string(ActionMethod m) {
    switch (m) {
        case ActionMethod::BinomialClosed:   return "binomial-closed";
        case ActionMethod::PerfectSquare:    return "perfect-square";
        case ActionMethod::QuarticElliptic:  return "quartic-elliptic";
        case ActionMethod::NumericCanonical: return "numeric-canonical";
        case ActionMethod::Asymptotic:       return "asymptotic";
    }
    return "?";
}

// A canonical (constant-free) improper action value with provenance.
struct RegularizedAction {
    Complex      value = 0.0;
    ActionMethod method = ActionMethod::BinomialClosed;
    Complex      residue = 0.0;      // beta_{-1}(0) of the momentum
    Real         error_estimate = 0.0;
    bool         log_branch = false; // closed form used the logarithmic (j integer) formula
};

enum class DetMethod {
    ZetaIntegrated,
    HadamardProduct,
    RecessiveSolution,
    HarmonicClosedForm,
};

inline const char* to_string(DetMethod m) {
    switch (m) {
        case DetMethod::ZetaIntegrated:     return "zeta-integrated";
        case DetMethod::HadamardProduct:    return "hadamard-product";
        case DetMethod::RecessiveSolution:  return "recessive-solution";
        case DetMethod::HarmonicClosedForm: return "harmonic-closed-form";
    }
    return "?";
}

struct DeterminantValue {
    Complex   value = 0.0;
    Complex   log_value = 0.0;  // determination tracked continuously from real positive lambda
    Parity    parity = Parity::Even;
    DetMethod method = DetMethod::ZetaIntegrated;
    Real      error_estimate = 0.0;
};

} // namespace wkbdet
