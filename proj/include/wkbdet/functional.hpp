#pragma once

#include <vector>

#include "wkbdet/rational.hpp"
#include "wkbdet/spectral.hpp"
#include "wkbdet/types.hpp"

namespace wkbdet::functional {

// First conjugate problem of V = q^N + v q^M + lambda.
struct ConjugateProblem {
    Real phi_N = 0.0;      // symmetry angle 4 pi / (N+2)
    Real phi_M = 0.0;
    Complex lambda1 = 0.0; // e^{-i phi_N} lambda
    Complex v1 = 0.0;      // e^{+i pi / j} v
    Complex Lambda1 = 0.0; // e^{-i phi_M} Lambda
    Complex z = 0.0;       // unit-modulus phase of the limiting bracket
};

ConjugateProblem conjugate_params(int N, int M, Complex lambda, Complex v);

struct WronskianOptions {
    Real ode_rtol = 1e-12;
    Real det_tol = 1e-8;
    bool allow_beyond_sector = false;
};

struct WronskianCheck {
    Complex residual = 0.0;   // lhs - rhs
    Complex rhs = 0.0;        // 2 i e^{i phi_N beta/2}
    Complex lhs = 0.0;
    Complex base_lambda = 0.0, base_v = 0.0;  // symmetric-frame base point
};

// Residual of the bilinear functional relation. The identity instance tagged
// by (lambda, v) is evaluated in the symmetric frame: base point
// (e^{+i phi_N/2} lambda, e^{-i pi/(2j)} v) and its first conjugate, so both
// determinant evaluations sit at arg v shifted by only pi/(2j) (inside the
// admissible sector when 2M + 2 > N). The pure harmonic N = 2 problem is
// evaluated directly through the Gamma closed forms.
WronskianCheck wronskian_check(int N, int M, Complex lambda, Complex v,
                               const WronskianOptions& opt = {});
Complex wronskian_residual(int N, int M, Complex lambda, Complex v,
                           const WronskianOptions& opt = {});

struct FactorizationCheck {
    Complex predicted_plus = 0.0, predicted_minus = 0.0;
    Complex computed_plus = 0.0, computed_minus = 0.0;
    Complex ratio_plus = 0.0, ratio_minus = 0.0;  // computed / predicted
    Complex Lambda = 0.0;
    Complex anomaly = 0.0;  // delta_{M,2} A(lambda, v)
};

// Large-v factorization of D_N^{+-} through the lower-degree determinants.
FactorizationCheck large_v_factorization(int N, int M, Real lambda, Complex v,
                                         const WronskianOptions& opt = {});

// Validity sector half-angle Theta = (M+2) pi/(N+2). Odd M accepted for
// formal evaluation of the supersymmetric family.
Real sector_theta(int N, int M);

struct InstantonAction {
    Complex value = 0.0;              // closed-form action to the first outer turning point
    Complex q0 = 0.0;                 // first outer turning point at the given v
    Real first_real_angle = 0.0;      // smallest arg v > 0 making the action real
};

InstantonAction instanton_action(int N, int M, Complex v);

// Residual of the limiting bilinear relation for D_M^{+-}(Lambda).
Complex limit_relation_residual(int M, Complex Lambda,
                                const spectral::LogDetOptions& opt = {});

struct TransitionRow {
    Real absv = 0.0;
    Complex bracket = 0.0;   // lhs with the exponential prefactors divided out
    Complex target = 0.0;    // z D_M^+(L1) D_M^-(L) - z^{-1} D_M^+(L) D_M^-(L1)
    Complex ratio = 0.0;
};

struct TransitionAudit {
    std::vector<TransitionRow> rows;
    bool converged = false;
    // numerical residuals of the three closed phase identities
    Real action_identity_residual = 0.0;   // I(v) + I(v1) - i phi_N beta/2
    Real z_identity_residual = 0.0;        // z - e^{i phi_M/4}
    Real anomaly_identity_residual = 0.0;  // A + A1 + i pi Lambda/4 (M = 2)
};

// v -> infinity transition of the functional relation along arg v = -pi/(2j).
// Requires j > 1 (2M + 2 > N); refuses otherwise.
TransitionAudit transition_audit(int N, int M, Real lambda,
                                 const std::vector<Real>& absv_ladder,
                                 const WronskianOptions& opt = {});

// Exact rational-pi phase algebra (angles in units of pi).
Rational z_phase_in_pi(int N, int M);              // phase of z
Rational phi_over_pi(int deg);                     // phi_deg / pi = 4/(deg+2)
bool phase_identity_z(int N, int M);               // z == e^{i phi_M/4}
bool phase_identity_action(int N, int M);          // I + I^[1] == i phi_N beta/2
bool phase_identity_anomaly(int N, int M);         // A + A^[1] == -i pi Lambda/4

} // namespace wkbdet::functional
