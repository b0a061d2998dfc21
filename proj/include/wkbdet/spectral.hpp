#pragma once

#include <memory>
#include <vector>

#include "wkbdet/types.hpp"

namespace wkbdet::spectral {

// Smooth eigenvalue model for the high end of the spectrum: the phase
// integral of the potential with the second-order correction,
// Q(E) = S(E) - (1/24) d/dE (contour integral of V''/p), solved for E at
// quantization value 2 pi (n + 1/2). Exact for harmonic potentials.
class SpectrumTail {
  public:
    explicit SpectrumTail(const TrinomialMomentum& potential);

    Real quantization(Real E) const;          // Q(E)
    Real quantization_derivative(Real E) const;
    Real level(Real n) const;                 // solve Q(E) = 2 pi (n + 1/2)

    const TrinomialMomentum& potential() const { return pot_; }

  private:
    TrinomialMomentum pot_;
    Real action_integral(Real E) const;       // S(E)
    Real action_derivative(Real E) const;     // S'(E)
    Real curvature_integral(Real E) const;    // contour integral of V''/p
};

// Eigenvalue list of one parity sector plus the tail model used for
// zeta sums. Immutable after construction.
struct ParitySpectrum {
    Parity parity = Parity::Even;
    std::vector<Real> eigenvalues;            // ascending, strictly positive
    int count = 0;                            // = eigenvalues.size()
    Real growth_exponent = 0.0;               // 2N/(N+2)
    Real bs_amplitude = 0.0;                  // leading amplitude of Q(E)
    std::shared_ptr<const SpectrumTail> tail;

    // model levels g(k) for sector indices k = count .. count + extension - 1
    std::vector<Real> model_levels;
    // cached far-tail quadrature nodes (model levels at huge index) + weights
    std::vector<Real> far_nodes;
    std::vector<Real> far_weights;            // includes the jacobian
    Real tail_start_index = 0.0;              // EM anchor a

    Real level_model(Real sector_index) const;
    Real self_check_error() const;            // |model - last explicit| relative
};

struct EigenOptions {
    Real tol = 1e-10;
    Real ode_rtol = 1e-12;
    int  model_extension = 4096;              // explicit model levels past count
};

// First `count` eigenvalues of -d^2/dq^2 + V with the parity boundary
// condition at q = 0, by inward shooting from a WKB-normalized recessive
// start. The momentum's lambda field must be zero (V itself).
ParitySpectrum eigenvalues(const TrinomialMomentum& m, Parity parity, int count,
                           const EigenOptions& opt = {});

// Cached access keyed by (m, parity, count).
std::shared_ptr<const ParitySpectrum> spectrum_cached(const TrinomialMomentum& m,
                                                      Parity parity, int count,
                                                      const EigenOptions& opt = {});

// Generalized zeta function Z^{parity}(s, lambda). Direct summation needs
// Re s > 1/2 + 1/N; s = 0 returns the closed scaling-law value.
Complex zeta(const TrinomialMomentum& m, Parity parity, Complex s, Complex lambda,
             int count = 128);
Complex zeta(const ParitySpectrum& spec, Complex s, Complex lambda);

struct LogDetOptions {
    Real tol = 1e-9;
    int  count = 128;
    int  fit_octaves = 6;
};

// Zeta-regularized log-determinant by integrating Z(1, .) (Z(2, .) twice for
// the harmonic case) with constants fixed by the classical large-lambda
// behavior log D = I(lambda) +- (1/4) log lambda.
DeterminantValue log_det(const TrinomialMomentum& m, Parity parity, Real lambda,
                         const LogDetOptions& opt = {});

// Hadamard product over the spectrum with a model-tail completion; valid for
// complex lambda.
DeterminantValue det_entire(const TrinomialMomentum& m, Parity parity, Complex lambda,
                            const LogDetOptions& opt = {});

struct RecessiveOptions {
    Real tol = 1e-8;
    Real ode_rtol = 1e-12;
    Real R = 0.0;                 // 0: choose from the WKB error bound
    bool allow_beyond_sector = false;
    bool r_doubling_check = true;
};

struct RecessiveSolution {
    Complex psi0 = 0.0;           // psi(0) times exp(log_norm)
    Complex dpsi0 = 0.0;
    Complex log_psi0 = 0.0;       // log of the canonical psi(0)
    Complex log_mdpsi0 = 0.0;     // log of -psi'(0)
    Real R = 0.0;
    int wkb_order = 3;
    Complex jost_factor = 0.0;    // ratio of true to classical normalization
    Real error_estimate = 0.0;    // from re-integration at doubled R
};

// Canonically normalized recessive solution at q = 0 for the full momentum
// (V + lambda packed in m.lambda), by inward integration from WKB data.
RecessiveSolution recessive_solution(const TrinomialMomentum& m,
                                     const RecessiveOptions& opt = {});

// Determinants from the recessive solution: D^- = psi(0), D^+ = -psi'(0)
// (normalization constants calibrated once against the harmonic closed forms).
// Requires |arg v| < Theta(N, M) unless opt.allow_beyond_sector.
DeterminantValue det_complex(const TrinomialMomentum& m, Parity parity, Complex lambda,
                             const RecessiveOptions& opt = {});

// Recomputes the harmonic calibration of the recessive normalization and
// checks it against the frozen constants (1, 1); throws on drift > tol.
std::pair<Complex, Complex> calibrate_recessive_normalization(Real tol = 1e-8);

// Closed forms for the harmonic determinants D_2^{+-}(Lambda).
Complex harmonic_det(Parity parity, Complex Lambda);
Complex log_harmonic_det(Parity parity, Complex Lambda);

// D_M^{+-}(Lambda) for the pure power x^M: closed form at M = 2, spectrum
// product for even M >= 4.
DeterminantValue power_det(int M, Parity parity, Complex Lambda,
                           const LogDetOptions& opt = {});

// Symanzik scaling of u q^N + v q^M + lambda to unit coefficient on x^M.
struct SymanzikScaling {
    TrinomialMomentum scaled;     // x^M-normalized operator data
    Real r = 1.0;                 // original = r * (scaled + Lambda)
    Complex Lambda = 0.0;         // v^{-2/(M+2)} lambda
    Complex zeta0_even = 0.0;     // Z^{+-}(0, Lambda) of the scaled operator
    Complex zeta0_odd = 0.0;

    Complex det_factor(Parity p) const;   // r^{Z(0, Lambda)}
};
SymanzikScaling symanzik_rescale(int N, int M, Complex u, Complex v, Complex lambda);

// Z(0, lambda) closed value -beta_{-1}(0)/N +- 1/4.
Complex zeta0(const TrinomialMomentum& m, Parity parity, Complex lambda);

// Admissible sector half-angle Theta = (M+2) pi / (N+2).
Real sector_half_angle(int N, int M);

} // namespace wkbdet::spectral
