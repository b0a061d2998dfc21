#pragma once

#include "wkbdet/types.hpp"

namespace wkbdet::specfun {

// Modulus of a complete elliptic integral, k^2 + k'^2 = 1.
// Accepted inputs: real k in [0,1], real k' in (0,1], or pure-imaginary k
// (the imaginary-modulus transformation handles the latter). Anything else
// is outside the toolbox and rejected.
class Modulus {
  public:
    static Modulus from_k(Complex k);
    static Modulus from_kprime(Real kprime);

    Complex k() const { return k_; }
    Complex kprime() const { return kprime_; }
    bool is_imaginary() const { return k_.real() == 0.0 && k_.imag() != 0.0; }

  private:
    Modulus(Complex k, Complex kprime) : k_(k), kprime_(kprime) {}
    Complex k_, kprime_;
};

Complex log_gamma(Complex z);
Complex gamma(Complex z);

// Complete elliptic integrals by arithmetic-geometric mean iteration.
Real ellip_K(const Modulus& m);
Real ellip_E(const Modulus& m);
inline Real ellip_K(Real k) { return ellip_K(Modulus::from_k(k)); }
inline Real ellip_E(Real k) { return ellip_E(Modulus::from_k(k)); }

Real dK_dk(const Modulus& m);

struct KEPair {
    Real K = 0.0;
    Real E = 0.0;
};

// Truncated k->1 expansions; valid orders are 0 and 1 for K (through k'^2)
// and 0..2 for E (through k'^4).
KEPair K_E_near_unit_modulus(Real kprime, int order = 2);

// Descending Landen step: given the transformed modulus k-dot (through its
// complement kdot_prime), returns K, E at k = (1 - k')/(1 + k').
KEPair landen_transform(Real kdot_prime);

// K, E at the pure-imaginary modulus k = i*ktilde/ktilde', via real ktilde.
KEPair imaginary_modulus_transform(Real ktilde);

} // namespace wkbdet::specfun
