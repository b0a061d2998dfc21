#pragma once

#include <optional>
#include <vector>

#include "wkbdet/rational.hpp"
#include "wkbdet/types.hpp"

namespace wkbdet::actions {

// One term of the descending large-q expansion of (V + lambda)^(1/2 - s):
// coefficient of q^(rho - N s).
struct BetaTerm {
    int     rho = 0;
    Complex coeff = 0.0;
};

// All expansion coefficients with rho >= N/2 - depth, in descending rho.
std::vector<BetaTerm> beta_ladder(const TrinomialMomentum& m, Complex s, int depth);

// beta_rho(s); throws if rho lies below the requested truncation depth.
Complex beta_coeff(const TrinomialMomentum& m, int rho, Complex s, int depth = 64);

// Residue beta_{-1}(0) of the momentum at q = infinity.
Complex residue(const TrinomialMomentum& m);

// Improper action of a binomial momentum u q^N + v q^M, closed form.
// Fires the logarithmic branch when j = (N+2)/(2(N-M)) is an integer
// (detected in exact rational arithmetic).
RegularizedAction action_binomial(Complex u, Complex v, int N, int M);

// s-regularized perfect-square family value: the closed form of
// integral_0^inf [(q^M + w q^L)^2]^(1/2 - s) dq,  M > L >= 0, w > 0.
Complex perfect_square_family_value(int M, int L, Real w, Complex s);

// Action of a perfect-square momentum (q^(N/2) + sqrt(lambda))^2 with N/2
// even; identically zero in that setting.
RegularizedAction action_perfect_square(const TrinomialMomentum& m);

// Quartic trinomial q^4 + v q^2 + lambda, v >= 0, lambda >= 0, not both zero.
RegularizedAction action_quartic(Real v, Real lambda);

// Bounded-contour primitive for the quartic, v >= 2 sqrt(lambda) > 0;
// equals action_quartic on this null-residue branch.
Complex contour_primitive_quartic(Real v, Real lambda);

struct NumericActionOptions {
    Real tol = 1e-9;             // stability budget for the fitted constant
    int  fit_points = 12;        // ladder points entering the canonical fit
    Real ladder_cutoff = -2.0;   // drop expansion exponents below this
};

// Numerical canonical primitive: the derivative route plus the
// constant-free large-lambda fit. N >= 4 uses one lambda-derivative; the
// harmonic case N = 2 uses two with the constant rule applied per level.
RegularizedAction action_numeric(const TrinomialMomentum& m,
                                 const NumericActionOptions& opt = {});

// Large-v asymptotic for q^N + v q^M + lambda at fixed lambda.
RegularizedAction action_large_v(int N, int M, Real lambda, Real v);

// A short asymptotic series in descending powers of v; log_coeff multiplies
// log(v) at the same power.
struct LargeVSeries {
    struct Term {
        Real power;       // exponent of v
        Complex coeff;    // v^power coefficient
        Complex log_coeff;// v^power * log(v) coefficient
    };
    std::vector<Term> terms;
    Real first_omitted_power = 0.0;

    Complex eval(Real v) const;
};

// Expansion of the quartic closed form for v -> +infinity at fixed lambda;
// implemented depth is 2 (orders v^{3/2}, v^{1/2}, v^{-1/2}).
LargeVSeries quartic_large_v_expansion(Real v, Real lambda, int order = 2);

// Canonical action continued to complex (v, lambda): anchored at the
// binomial value I(lambda = 0, v) and continued along the straight
// lambda-path. Requires N >= 4 and turning points away from the positive
// real q-axis.
Complex action_continued(const TrinomialMomentum& m, Real rel_tol = 1e-12);

// d I / d lambda = (1/2) integral_0^inf (V + lambda)^(-1/2) dq for N >= 4,
// with the momentum branch continued from q = +infinity. Exposed for the
// spectral module's classical matching.
Complex action_lambda_derivative(const TrinomialMomentum& m, Real rel_tol = 1e-12);

// integral_0^R Pi(q)^ipow dq (ipow odd), momentum branch continued downward
// from the principal value at q = R.
Complex momentum_core_integral(const TrinomialMomentum& m, int ipow, Real R,
                               Real rel_tol = 1e-12);

// Canonical action for the full momentum in m (closed form where available,
// numeric canonical evaluator otherwise); real non-negative parameters.
Complex canonical_action(const TrinomialMomentum& m, Real tol = 1e-9);

// Exponents of the large-lambda expansion of the canonical action
// (lambda^alpha, optionally with one power of log lambda at alpha = 0).
struct LadderExponent {
    Rational alpha;
    bool with_log = false;
};
std::vector<LadderExponent> large_lambda_ladder(int N, int M, Real cutoff);

} // namespace wkbdet::actions
