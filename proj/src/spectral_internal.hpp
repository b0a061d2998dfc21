#pragma once

#include <functional>

#include "wkbdet/spectral.hpp"

namespace wkbdet::spectral::detail {

// Sum of h(lambda_k) over the whole sector tail k >= spec.count: explicit
// model levels, then Euler-Maclaurin with two correction orders at the far
// anchor, with the remaining integral taken over cached far nodes.
Complex tail_sum(const ParitySpectrum& spec, const std::function<Complex(Real)>& h);

// Sum of h over explicit eigenvalues plus the model tail.
Complex spectral_sum(const ParitySpectrum& spec, const std::function<Complex(Real)>& h);

// Shooting boundary functional psi'(0) (even) or psi(0) (odd), scale-free sign.
Real boundary_functional(const TrinomialMomentum& potential, Parity parity, Real E,
                         Real ode_rtol);

} // namespace wkbdet::spectral::detail
