#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

#include "wkbdet/types.hpp"

namespace wkbdet {

// Adaptive eighth-order Dormand-Prince integrator (the DOP853 tableau of
// Hairer & Wanner) on a fixed-size state of real or complex scalars.
// The per-step controller follows the reference scheme: combined 5th/3rd
// order error estimate, PI-free step factor with safety 0.9.
template <class Scalar, std::size_t Dim>
class Dop853 {
  public:
    using State = std::array<Scalar, Dim>;
    using Rhs = std::function<void(double, const State&, State&)>;

    struct Options {
        double rtol = 1e-12;
        double atol = 1e-14;
        double initial_step = 0.0;   // 0: choose automatically
        long   max_steps = 40'000'000;
        // Called after each accepted step; may rescale the state (returns a
        // log-scale increment applied by the caller's bookkeeping).
        std::function<double(double, State&)> renormalize;
    };

    Dop853(Rhs rhs, Options opt) : f_(std::move(rhs)), opt_(opt) {}

    // Integrates y from t0 to t1 (either direction). Returns the accumulated
    // log-scale from renormalization callbacks.
    double integrate(double t0, double t1, State& y) const {
        const double dir = (t1 >= t0) ? 1.0 : -1.0;
        const double hmax = std::abs(t1 - t0);
        double t = t0;
        State k1;
        f_(t, y, k1);
        double h = opt_.initial_step != 0.0 ? std::abs(opt_.initial_step)
                                            : initial_step_guess(t, y, k1, hmax);
        h *= dir;
        double facold = 1e-4;
        double log_scale = 0.0;
        bool last = false;
        for (long step = 0; step < opt_.max_steps; ++step) {
            if ((t + 1.01 * h - t1) * dir > 0.0) {
                h = t1 - t;
                last = true;
            }
            if (std::abs(h) <= std::abs(t) * 1e-18 + 1e-300)
                throw NumericError("Dop853: step size underflow");
            State ynew, k4acc;
            double err = attempt_step(t, y, k1, h, ynew, k4acc);
            const double expo1 = 1.0 / 8.0;
            double fac11 = std::pow(err, expo1);
            double fac = fac11 / std::pow(facold, 0.0);
            fac = std::max(1.0 / 6.0, std::min(3.0, fac / 0.9));
            double hnew = h / fac;
            if (err <= 1.0) {
                facold = std::max(err, 1e-4);
                t += h;
                y = ynew;
                if (opt_.renormalize) log_scale += opt_.renormalize(t, y);
                f_(t, y, k1);
                if (last) return log_scale;
                if (std::abs(hnew) > hmax) hnew = dir * hmax;
            } else {
                hnew = h / std::min(6.0, fac11 / 0.9);
                last = false;
            }
            h = hnew;
        }
        throw NumericError("Dop853: exceeded max step count");
    }

  private:
    Rhs f_;
    Options opt_;

    static double norm(const State& a, const State& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < Dim; ++i)
            s += std::norm(Complex(a[i])) / (std::norm(Complex(b[i])) + 1e-300);
        return std::sqrt(s / Dim);
    }

    double initial_step_guess(double t, const State& y, const State& k1, double hmax) const {
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            double sk = opt_.atol + opt_.rtol * std::abs(Complex(y[i]));
            dnf += std::norm(Complex(k1[i])) / (sk * sk);
            dny += std::norm(Complex(y[i])) / (sk * sk);
        }
        double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        return std::min(h, hmax);
    }

    // One trial step; returns the scaled error measure (<= 1 means accept).
    double attempt_step(double t, const State& y, const State& k1, double h,
                        State& out, State& k4acc) const {
        // DOP853 tableau (Hairer & Wanner).
        static constexpr double
            c2 = 0.526001519587677318785587544488e-01, c3 = 0.789002279381515978178381316732e-01,
            c4 = 0.118350341907227396726757197510e+00, c5 = 0.281649658092772603273242802490e+00,
            c6 = 0.333333333333333333333333333333e+00, c7 = 0.25e+00,
            c8 = 0.307692307692307692307692307692e+00, c9 = 0.651282051282051282051282051282e+00,
            c10 = 0.6e+00, c11 = 0.857142857142857142857142857142e+00,
            b1 = 5.42937341165687622380535766363e-2, b6 = 4.45031289275240888144113950566e0,
            b7 = 1.89151789931450038304281599044e0, b8 = -5.8012039600105847814672114227e0,
            b9 = 3.1116436695781989440891606237e-1, b10 = -1.52160949662516078556178806805e-1,
            b11 = 2.01365400804030348374776537501e-1, b12 = 4.47106157277725905176885569043e-2,
            a21 = 5.26001519587677318785587544488e-2,
            a31 = 1.97250569845378994544595329183e-2, a32 = 5.91751709536136983633785987549e-2,
            a41 = 2.95875854768068491816892993775e-2, a43 = 8.87627564304205475450678981324e-2,
            a51 = 2.41365134159266685502369798665e-1, a53 = -8.84549479328286085344864962717e-1,
            a54 = 9.24834003261792003115737966543e-1,
            a61 = 3.7037037037037037037037037037e-2, a64 = 1.70828608729473871279604482173e-1,
            a65 = 1.25467687566822425016691814123e-1,
            a71 = 3.7109375e-2, a74 = 1.70252211019544039314978060272e-1,
            a75 = 6.02165389804559606850219397283e-2, a76 = -1.7578125e-2,
            a81 = 3.70920001185047927108779319836e-2, a84 = 1.70383925712239993810214054705e-1,
            a85 = 1.07262030446373284651809199168e-1, a86 = -1.53194377486244017527936158236e-2,
            a87 = 8.27378916381402288758473766002e-3,
            a91 = 6.24110958716075717114429577812e-1, a94 = -3.36089262944694129406857109825e0,
            a95 = -8.68219346841726006818189891453e-1, a96 = 2.75920996994467083049415600797e1,
            a97 = 2.01540675504778934086186788979e1, a98 = -4.34898841810699588477366255144e1,
            a101 = 4.77662536438264365890433908527e-1, a104 = -2.48811461997166764192642586468e0,
            a105 = -5.90290826836842996371446475743e-1, a106 = 2.12300514481811942347288949897e1,
            a107 = 1.52792336328824235832596922938e1, a108 = -3.32882109689848629194453265587e1,
            a109 = -2.03312017085086261358222928593e-2,
            a111 = -9.3714243008598732571704021658e-1, a114 = 5.18637242884406370830023853209e0,
            a115 = 1.09143734899672957818500254654e0, a116 = -8.14978701074692612513997267357e0,
            a117 = -1.85200656599969598641566180701e1, a118 = 2.27394870993505042818970056734e1,
            a119 = 2.49360555267965238987089396762e0, a1110 = -3.0467644718982195003823669022e0,
            a121 = 2.27331014751653820792359768449e0, a124 = -1.05344954667372501984066689879e1,
            a125 = -2.00087205822486249909675718444e0, a126 = -1.79589318631187989172765950534e1,
            a127 = 2.79488845294199600508499808837e1, a128 = -2.85899827713502369474065508674e0,
            a129 = -8.87285693353062954433549289258e0, a1210 = 1.23605671757943030647266201528e1,
            a1211 = 6.43392746015763530355970484046e-1,
            bhh1 = 0.244094488188976377952755905512e+00, bhh2 = 0.733846688281611857341361741547e+00,
            bhh3 = 0.220588235294117647058823529412e-01,
            er1 = 0.1312004499419488073250102996e-01, er6 = -0.1225156446376204440720569753e+01,
            er7 = -0.4957589496572501915214079952e+00, er8 = 0.1664377182454986536961530415e+01,
            er9 = -0.3503288487499736816886487290e+00, er10 = 0.3341791187130174790297318841e+00,
            er11 = 0.8192320648511571246570742613e-01, er12 = -0.2235530786388629525884427845e-01;

        State k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, tmp;
        auto stage = [&](double c, const State& arg, State& out_k) { f_(t + c * h, arg, out_k); };

        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a21 * k1[i]);
        stage(c2, tmp, k2);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        stage(c3, tmp, k3);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a43 * k3[i]);
        stage(c4, tmp, k4);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        stage(c5, tmp, k5);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        stage(c6, tmp, k6);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        stage(c7, tmp, k7);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        stage(c8, tmp, k8);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i]);
        stage(c9, tmp, k9);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
        stage(c10, tmp, k10);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        stage(c11, tmp, k11);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i]);
        stage(1.0, tmp, k12);

        double err5 = 0.0, err3 = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            Scalar sum = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                         b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
            k4acc[i] = sum;
            out[i] = y[i] + h * sum;
            double sk = opt_.atol + opt_.rtol * std::max(std::abs(Complex(y[i])), std::abs(Complex(out[i])));
            Scalar e3 = sum - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
            Scalar e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                        er10 * k10[i] + er11 * k11[i] + er12 * k12[i];
            err3 += std::norm(Complex(e3)) / (sk * sk);
            err5 += std::norm(Complex(e5)) / (sk * sk);
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        return std::abs(h) * err5 * std::sqrt(1.0 / (Dim * deno));
    }
};

} // namespace wkbdet
