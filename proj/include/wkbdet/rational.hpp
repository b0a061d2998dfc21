#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace wkbdet {

// Exact rational arithmetic for exponent bookkeeping (j = (N+2)/(2(N-M)))
// and for the phase identities, which are rational multiples of pi.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    bool is_integer() const { return den == 1; }
    double to_double() const { return double(num) / double(den); }

    friend Rational operator+(Rational a, Rational b) { return Rational(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rational operator-(Rational a, Rational b) { return Rational(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
    friend Rational operator/(Rational a, Rational b) {
        if (b.num == 0) throw std::domain_error("Rational: division by zero");
        return Rational(a.num * b.den, a.den * b.num);
    }
    Rational operator-() const { return Rational(-num, den); }
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(Rational a, Rational b) { return !(a == b); }
};

// Reduction of a phase angle (a rational multiple of pi) modulo 2*pi into [0, 2).
inline Rational mod_two(Rational r) {
    std::int64_t two_den = 2 * r.den;
    std::int64_t n = r.num % two_den;
    if (n < 0) n += two_den;
    return Rational(n, r.den);
}

// Exact exponent j for the trinomial ladder; used so that the j-integer
// (logarithmic) branch never misfires from floating classification.
inline Rational exponent_j(int N, int M) {
    return Rational(N + 2, 2 * (N - M));
}

} // namespace wkbdet
