// Band-limited test signals, stored as uniform Fourier-domain samples.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "common.hpp"

namespace wframe {

// f-hat samples on the uniform grid gamma_i = -omega_max + i*step, i = 0..count-1,
// with an odd count so gamma = 0 is a grid point. Norms are trapezoidal.
struct BandlimitedSignal {
    double omega_max = 0.0;
    double step = 0.0;
    std::vector<cplx> values;

    double gamma(std::size_t i) const { return -omega_max + step * static_cast<double>(i); }

    // trapezoidal integral of |f-hat|^2 over [-omega_max, omega_max]
    double norm2() const {
        Kahan acc;
        for (std::size_t i = 0; i < values.size(); ++i) {
            double w = (i == 0 || i + 1 == values.size()) ? 0.5 : 1.0;
            acc.add(w * std::norm(values[i]));
        }
        return acc.sum() * step;
    }
};

inline void validate_signal(const BandlimitedSignal& f) {
    if (!(f.omega_max > 0.0) || !(f.step > 0.0)) throw Error("signal: need omega_max > 0 and step > 0");
    if (f.values.size() < 3 || f.values.size() % 2 == 0)
        throw Error("signal: need an odd sample count >= 3");
    double span = f.step * static_cast<double>(f.values.size() - 1);
    if (std::abs(span - 2.0 * f.omega_max) > 1e-9 * f.omega_max)
        throw Error("signal: sample count does not match omega_max / step");
}

// Deterministic pseudo-random band-limited spectra. Each signal is a low-order
// random trigonometric polynomial (complex Gaussian coefficients) shaped by a
// fixed bump supported on omega_max/2 <= |gamma| <= omega_max and vanishing at
// both edges, then normalized to ||f|| = 1. Signal s uses stream s of the seed,
// so any prefix of the batch is reproducible.
inline std::vector<BandlimitedSignal> random_bandlimited(std::uint64_t seed, double omega_max,
                                                         double step, std::size_t count) {
    if (!(omega_max > 0.0) || !(step > 0.0)) throw Error("random_bandlimited: need omega_max > 0 and step > 0");
    double half_steps = omega_max / step;
    auto half_n = static_cast<long long>(std::llround(half_steps));
    if (half_n < 1 || std::abs(half_steps - static_cast<double>(half_n)) > 1e-9)
        throw Error("random_bandlimited: step must divide omega_max");

    constexpr int trig_order = 16;
    std::size_t n = 2 * static_cast<std::size_t>(half_n) + 1;
    std::vector<BandlimitedSignal> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Pcg32 rng(seed, static_cast<std::uint64_t>(s));
        std::vector<cplx> coef(trig_order);
        for (auto& z : coef) {
            double re = rng.next_gauss();
            double im = rng.next_gauss();
            z = cplx{re, im};
        }
        BandlimitedSignal f;
        f.omega_max = omega_max;
        f.step = step;
        f.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double g = f.gamma(i);
            double t = (std::abs(g) - 0.5 * omega_max) / (0.5 * omega_max);
            if (t <= 0.0 || t >= 1.0) continue;
            double u = 4.0 * t * (1.0 - t);
            double bump = u * u * u * u;
            cplx w{0.0, 0.0};
            for (int m = 0; m < trig_order; ++m) {
                double ph = 2.0 * pi * static_cast<double>(m) * g / (2.0 * omega_max);
                w += coef[static_cast<std::size_t>(m)] * std::polar(1.0, ph);
            }
            f.values[i] = bump * w;
        }
        double n2 = f.norm2();
        if (!(n2 > 0.0)) throw Error("random_bandlimited: degenerate draw");
        double inv = 1.0 / std::sqrt(n2);
        for (auto& v : f.values) v *= inv;
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace wframe
