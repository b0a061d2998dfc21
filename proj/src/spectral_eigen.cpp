#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "spectral_internal.hpp"
#include "wkbdet/ode.hpp"
#include "wkbdet/quadrature.hpp"
#include "wkbdet/spectral.hpp"

namespace wkbdet::spectral {

namespace {

// Composite Gauss-Legendre on [0,1] with fixed nodes: the integrands below
// are analytic after the turning-point substitution, and fixed nodes keep
// the result smooth in E (needed for finite differences in E).
template <class F>
Real gl_unit(const F& f) {
    const auto& gl = GaussLegendre::order40();
    Real total = 0.0;
    for (int seg = 0; seg < 2; ++seg) {
        Real a = 0.5 * seg;
        Real acc = 0.0;
        for (std::size_t i = 0; i < gl.x.size(); ++i)
            acc += gl.w[i] * f(a + 0.25 + 0.25 * gl.x[i]);
        total += acc * 0.25;
    }
    return total;
}

Real potential_value(const TrinomialMomentum& m, Real q) {
    Real r = m.u.real() * std::pow(q, m.N);
    r += m.M > 0 ? m.v.real() * std::pow(q, m.M) : m.v.real();
    return r;
}

Real potential_d1(const TrinomialMomentum& m, Real q) {
    Real r = m.u.real() * m.N * std::pow(q, m.N - 1);
    if (m.M > 0) r += m.v.real() * m.M * std::pow(q, m.M - 1);
    return r;
}

Real potential_d2(const TrinomialMomentum& m, Real q) {
    Real r = m.u.real() * m.N * (m.N - 1) * std::pow(q, m.N - 2);
    if (m.M >= 2) r += m.v.real() * m.M * (m.M - 1) * std::pow(q, m.M - 2);
    return r;
}

// Turning point V(qt) = E on the positive axis (V increasing there).
Real turning_point(const TrinomialMomentum& m, Real E) {
    Real q = std::pow(E / std::abs(m.u), 1.0 / m.N);
    for (int it = 0; it < 200; ++it) {
        Real f = potential_value(m, q) - E;
        Real df = potential_d1(m, q);
        Real dq = f / df;
        q -= dq;
        if (q <= 0.0) q = 1e-12;
        if (std::abs(dq) < 1e-15 * q) break;
    }
    return q;
}

} // namespace

SpectrumTail::SpectrumTail(const TrinomialMomentum& potential) : pot_(potential) {
    if (potential.lambda != Complex(0.0))
        throw DomainError("SpectrumTail: pass the potential without the lambda shift");
    if (!potential.real_nonnegative())
        throw DomainError("SpectrumTail: requires real non-negative potential data");
}

Real SpectrumTail::action_integral(Real E) const {
    Real qt = turning_point(pot_, E);
    // q = qt (1 - t^2) removes the square-root endpoint
    return 4.0 * gl_unit([&](Real t) {
        Real q = qt * (1.0 - t * t);
        Real w = std::max(0.0, E - potential_value(pot_, q));
        return std::sqrt(w) * 2.0 * qt * t;
    });
}

Real SpectrumTail::action_derivative(Real E) const {
    Real qt = turning_point(pot_, E);
    return 2.0 * gl_unit([&](Real t) {
        Real q = qt * (1.0 - t * t);
        Real w = std::max(1e-300, E - potential_value(pot_, q));
        return 2.0 * qt * t / std::sqrt(w);
    });
}

Real SpectrumTail::curvature_integral(Real E) const {
    Real qt = turning_point(pot_, E);
    return 4.0 * gl_unit([&](Real t) {
        Real q = qt * (1.0 - t * t);
        Real w = std::max(1e-300, E - potential_value(pot_, q));
        return potential_d2(pot_, q) * 2.0 * qt * t / std::sqrt(w);
    });
}

Real SpectrumTail::quantization(Real E) const {
    // second-order phase correction -(1/24) d/dE of the curvature integral;
    // vanishes identically for harmonic potentials
    const Real h = 2e-3 * E;
    Real dA2 = (curvature_integral(E + h) - curvature_integral(E - h)) / (2.0 * h);
    return action_integral(E) - dA2 / 24.0;
}

Real SpectrumTail::quantization_derivative(Real E) const { return action_derivative(E); }

Real SpectrumTail::level(Real n) const {
    const Real target = 2.0 * kPi * (n + 0.5);
    const Real p = Real(pot_.N + 2) / (2.0 * pot_.N);
    Real E = std::pow(target, 1.0 / p);
    Real S1 = action_integral(std::max(E, 1.0)) / std::pow(std::max(E, 1.0), p);
    E = std::pow(target / S1, 1.0 / p);
    for (int it = 0; it < 60; ++it) {
        Real f = quantization(E) - target;
        Real df = action_derivative(E);
        Real dE = f / df;
        if (E - dE <= 0.0) dE = 0.5 * E;
        E -= dE;
        if (std::abs(dE) < 1e-13 * E) break;
    }
    return E;
}

Real ParitySpectrum::level_model(Real sector_index) const {
    const int sigma = parity == Parity::Odd ? 1 : 0;
    return tail->level(2.0 * sector_index + sigma);
}

Real ParitySpectrum::self_check_error() const {
    if (eigenvalues.empty()) return 0.0;
    Real last = eigenvalues.back();
    Real model = level_model(Real(count - 1));
    return std::abs(model - last) / last;
}

namespace detail {

Real boundary_functional(const TrinomialMomentum& potential, Parity parity, Real E,
                         Real ode_rtol) {
    const Real qt = turning_point(potential, E);
    // push R outward until the forbidden-region phase is deep enough that
    // the subdominant admixture sits far below the eigenvalue tolerance
    Real R = 1.3 * qt + 0.5;
    auto phase = [&](Real r) {
        const auto& gl = GaussLegendre::order20();
        Real acc = 0.0;
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            Real q = 0.5 * (qt + r) + 0.5 * (r - qt) * gl.x[i];
            acc += gl.w[i] * std::sqrt(std::max(0.0, potential_value(potential, q) - E));
        }
        return acc * 0.5 * (r - qt);
    };
    while (phase(R) < 22.0 && R < 1e6) R *= 1.25;

    auto W = [&](Real q) { return potential_value(potential, q) - E; };
    Real Pi = std::sqrt(W(R));
    Real W1 = potential_d1(potential, R);
    Real W2 = potential_d2(potential, R);
    Real Pi1 = W1 / (2.0 * Pi);
    Real Pi2 = W2 / (2.0 * Pi) - W1 * W1 / (4.0 * Pi * Pi * Pi);
    Real y2 = -Pi2 / (4.0 * Pi * Pi) + 3.0 * Pi1 * Pi1 / (8.0 * Pi * Pi * Pi);

    using Stepper = Dop853<Real, 2>;
    Stepper::Options opt;
    opt.rtol = ode_rtol;
    opt.atol = 1e-280;
    opt.renormalize = [](double, std::array<Real, 2>& y) {
        Real mag = std::max(std::abs(y[0]), std::abs(y[1]));
        if (mag > 1e120) {
            y[0] /= mag;
            y[1] /= mag;
            return std::log(mag);
        }
        return 0.0;
    };
    Stepper stepper(
        [&](double q, const std::array<Real, 2>& y, std::array<Real, 2>& dy) {
            dy[0] = y[1];
            dy[1] = W(q) * y[0];
        },
        opt);
    std::array<Real, 2> y{1.0, -Pi - Pi1 / (2.0 * Pi) + y2};
    stepper.integrate(R, 0.0, y);
    return parity == Parity::Even ? y[1] : y[0];
}

} // namespace detail

ParitySpectrum eigenvalues(const TrinomialMomentum& m, Parity parity, int count,
                           const EigenOptions& opt) {
    m.validate();
    if (m.lambda != Complex(0.0))
        throw DomainError("eigenvalues: pass the potential without the lambda shift");
    if (!m.real_nonnegative())
        throw DomainError("eigenvalues: requires real non-negative potential data");
    if (count < 1) throw DomainError("eigenvalues: count must be >= 1");

    ParitySpectrum spec;
    spec.parity = parity;
    spec.count = count;
    spec.growth_exponent = 2.0 * m.N / (m.N + 2.0);
    spec.tail = std::make_shared<SpectrumTail>(m);
    const int sigma = parity == Parity::Odd ? 1 : 0;

    auto f = [&](Real E) { return detail::boundary_functional(m, parity, E, opt.ode_rtol); };

    spec.eigenvalues.reserve(count);
    for (int k = 0; k < count; ++k) {
        Real n = 2.0 * k + sigma;
        Real lo = spec.tail->level(n - 0.45);
        Real hi = spec.tail->level(n + 0.45);
        Real flo = f(lo), fhi = f(hi);
        if (flo * fhi > 0.0) {
            lo = spec.tail->level(n - 0.95);
            hi = spec.tail->level(n + 0.95);
            flo = f(lo);
            fhi = f(hi);
            if (flo * fhi > 0.0)
                throw NumericError("eigenvalues: level not bracketed after widening once");
        }
        for (int it = 0; it < 8; ++it) {
            Real mid = 0.5 * (lo + hi);
            Real fm = f(mid);
            if (flo * fm <= 0.0) {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        Real a = lo, b = hi, fa = flo, fb = fhi;
        for (int it = 0; it < 60; ++it) {
            Real c = b - fb * (b - a) / (fb - fa);
            if (!(c > lo && c < hi)) c = 0.5 * (a + b);
            Real fc = f(c);
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            if (std::abs(b - a) < opt.tol * std::max(1.0, std::abs(b))) break;
        }
        Real level = b;
        if (!spec.eigenvalues.empty() && level <= spec.eigenvalues.back())
            throw NumericError("eigenvalues: non-monotone level sequence");
        spec.eigenvalues.push_back(level);
    }

    // model extension and far-tail quadrature cache
    const int ext = opt.model_extension;
    spec.model_levels.reserve(ext);
    for (int k = count; k < count + ext; ++k)
        spec.model_levels.push_back(spec.tail->level(2.0 * k + sigma));
    spec.tail_start_index = Real(count + ext);

    const Real a_idx = spec.tail_start_index;
    const auto& gl = GaussLegendre::order40();
    for (std::size_t j = 0; j < gl.x.size(); ++j) {
        Real t = 0.5 + 0.5 * gl.x[j];  // maps to k = a / t^3 in (a, inf)
        Real k_idx = a_idx * std::pow(t, -3.0);
        spec.far_nodes.push_back(spec.tail->level(2.0 * k_idx + sigma));
        spec.far_weights.push_back(0.5 * gl.w[j] * 3.0 * a_idx * std::pow(t, -4.0));
    }
    for (Real off : {-1.0, -0.5, 0.0, 0.5, 1.0})
        spec.far_nodes.push_back(spec.tail->level(2.0 * (a_idx + off) + sigma));

    spec.bs_amplitude = spec.tail->quantization(spec.eigenvalues.back()) /
                        std::pow(spec.eigenvalues.back(), (m.N + 2.0) / (2.0 * m.N));

    if (spec.self_check_error() > 1e-3)
        throw NumericError("eigenvalues: tail model fails the self-check at the last level");
    return spec;
}

namespace detail {

Complex tail_sum(const ParitySpectrum& spec, const std::function<Complex(Real)>& h) {
    Complex total = 0.0;
    for (Real g : spec.model_levels) total += h(g);
    // far tail: integral over cached nodes plus two Euler-Maclaurin orders
    const std::size_t nq = spec.far_nodes.size() - 5;
    for (std::size_t j = 0; j < nq; ++j) total += spec.far_weights[j] * h(spec.far_nodes[j]);
    Complex h_m1 = h(spec.far_nodes[nq + 0]);
    Complex h_mh = h(spec.far_nodes[nq + 1]);
    Complex h_0 = h(spec.far_nodes[nq + 2]);
    Complex h_ph = h(spec.far_nodes[nq + 3]);
    Complex h_p1 = h(spec.far_nodes[nq + 4]);
    Complex d1 = h_ph - h_mh;                                     // h'(a), step 1/2
    Complex d3 = (h_p1 - 2.0 * h_ph + 2.0 * h_mh - h_m1) / 0.25;  // h'''(a)
    total += 0.5 * h_0 - d1 / 12.0 + d3 / 720.0;
    return total;
}

Complex spectral_sum(const ParitySpectrum& spec, const std::function<Complex(Real)>& h) {
    Complex total = 0.0;
    for (Real lk : spec.eigenvalues) total += h(lk);
    return total + tail_sum(spec, h);
}

} // namespace detail

std::shared_ptr<const ParitySpectrum> spectrum_cached(const TrinomialMomentum& m,
                                                      Parity parity, int count,
                                                      const EigenOptions& opt) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const ParitySpectrum>> cache;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d|%d|%.17g|%.17g|%d|%d", m.N, m.M, m.u.real(),
                  m.v.real(), int(parity), count);
    std::string key(buf);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto spec = std::make_shared<ParitySpectrum>(eigenvalues(m, parity, count, opt));
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, spec);
    return spec;
}

} // namespace wkbdet::spectral
