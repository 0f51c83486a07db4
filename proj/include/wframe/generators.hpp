#pragma once
// Generator zoo: B-spline spectra, the periodization G, Battle-Lemarie
// wavelets, perturbed generators theta = psi + (eta/sqrt2) psi(./2), the
// Shannon-type indicator, and the measurable-set counterexample. A string
// registry maps CLI names onto spectra with their certified metadata.
#include <charconv>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "sums.hpp"

namespace wframe {

namespace detail {

inline double powi(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

}  // namespace detail

// Values of the order-m B-spline N_m at the integers 0..m (exact small rationals).
inline const std::vector<double>& bspline_integer_values(int m) {
    if (m < 1) throw Error("bspline_integer_values: m must be >= 1");
    static std::mutex mu;
    static std::vector<std::vector<double>> cache{{}, {1.0, 0.0}};
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(cache.size()) <= m) {
        int n = static_cast<int>(cache.size());
        const auto& prev = cache[static_cast<std::size_t>(n - 1)];
        std::vector<double> cur(static_cast<std::size_t>(n) + 1, 0.0);
        for (int x = 0; x <= n; ++x) {
            double t1 = x <= n - 1 ? prev[static_cast<std::size_t>(x)] : 0.0;
            double t2 = x >= 1 && x <= n ? prev[static_cast<std::size_t>(x - 1)] : 0.0;
            cur[static_cast<std::size_t>(x)] =
                (static_cast<double>(x) * t1 + static_cast<double>(n - x) * t2) / static_cast<double>(n - 1);
        }
        cache.push_back(std::move(cur));
    }
    return cache[static_cast<std::size_t>(m)];
}

inline cplx bspline_spectrum(int m, double gamma) {
    if (m < 1) throw Error("bspline_spectrum: m must be >= 1");
    // ((1 - e^{-2 pi i g})/(2 pi i g))^m = e^{-i pi g m} sinc(pi g)^m
    double base = detail::powi(detail::sinc(pi * gamma), m);
    return std::polar(base, -pi * gamma * static_cast<double>(m));
}

// G(gamma) = sum_k |N_m^(gamma+k)|^2. The autocorrelation of N_m is N_2m, so G
// is the exact cosine polynomial with coefficients N_2m(m-l); no tail remains
// and tol is accepted only for interface uniformity.
inline double periodization_G(int m, double gamma, double /*tol*/ = 0.0) {
    if (m < 1) throw Error("periodization_G: m must be >= 1");
    const auto& v = bspline_integer_values(2 * m);
    Kahan acc;
    acc.add(v[static_cast<std::size_t>(m)]);
    for (int l = 1; l <= m - 1; ++l)
        acc.add(2.0 * v[static_cast<std::size_t>(m - l)] * std::cos(2.0 * pi * static_cast<double>(l) * gamma));
    return acc.sum();
}

inline cplx battle_lemarie_spectrum(int m, double gamma) {
    if (m < 1) throw Error("battle_lemarie_spectrum: m must be >= 1");
    if (gamma == 0.0) return {0.0, 0.0};
    double g_shift = periodization_G(m, 0.5 * gamma + 0.5);
    double g_full = periodization_G(m, gamma);
    double g_half = periodization_G(m, 0.5 * gamma);
    double root = std::sqrt(g_shift / (g_full * g_half));
    double s = std::sin(0.5 * pi * gamma);
    double z = 2.0 * s * s / (pi * gamma);  // (1 - cos(pi g))/(pi g), cancellation-free
    static const cplx inv_i_pow[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    return root * detail::powi(z, m) * inv_i_pow[m & 3] * std::polar(1.0, -pi * gamma);
}

inline Spectrum make_bspline(int m) {
    Spectrum s("bspline:" + std::to_string(m), [m](double g) { return bspline_spectrum(m, g); });
    // |N_m^(g)| |g|^m = |sin(pi g)|^m / pi^m exactly; no control at g = 0
    s.profile = ResidueProfile{1.0, static_cast<double>(m), [m](double t) {
                                   return detail::powi(std::abs(std::sin(pi * t)) / pi, m);
                               }};
    if (m >= 2) s.envelope = fit_decay_envelope(s, static_cast<double>(m - 1), 1e4).env;
    return s;
}

inline Spectrum make_battle_lemarie(int m) {
    Spectrum s("battle-lemarie:" + std::to_string(m),
               [m](double g) { return battle_lemarie_spectrum(m, g); });
    // |psihat| = root * |z|^m with |z| <= pi|g|/2, root <= sqrt(Gmax)/Gmin, Gmax = 1
    double g_min = periodization_G(m, 0.5);
    s.zero_bound = ZeroBound{detail::powi(0.5 * pi, m) / g_min, static_cast<double>(m), 1e12};
    // |psihat(g)| |g|^m is exactly 2-periodic in |g|: G is 1-periodic
    s.profile = ResidueProfile{2.0, static_cast<double>(m), [m](double t) {
                                   double root = std::sqrt(periodization_G(m, 0.5 * t + 0.5) /
                                                           (periodization_G(m, t) * periodization_G(m, 0.5 * t)));
                                   double u = std::sin(0.5 * pi * t);
                                   return root * detail::powi(2.0 * u * u / pi, m);
                               }};
    if (m >= 2) s.envelope = fit_decay_envelope(s, static_cast<double>(m - 1), 1e4).env;
    return s;
}

inline Spectrum perturbed_spectrum(const Spectrum& base, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw Error("perturbed_spectrum: eta must lie in (0, 1)");
    double c = eta / std::sqrt(2.0);
    Spectrum s("perturbed:" + base.name() + ":" + fmt_double(eta),
               [base, c](double g) { return base(g) + c * base(0.5 * g); });
    if (base.envelope)
        s.envelope = DecayEnvelope{
            base.envelope->C * (1.0 + c * std::pow(2.0, 1.0 + base.envelope->sigma)),
            base.envelope->sigma};
    if (base.support_hint)
        s.support_hint = Interval{std::min(base.support_hint->lo, 2.0 * base.support_hint->lo),
                                  std::max(base.support_hint->hi, 2.0 * base.support_hint->hi)};
    s.inner_radius = base.inner_radius;
    if (base.zero_bound)
        s.zero_bound = ZeroBound{base.zero_bound->scale * (1.0 + c * std::pow(2.0, -base.zero_bound->power)),
                                 base.zero_bound->power, base.zero_bound->radius};
    if (base.profile) {
        auto bp = *base.profile;
        double two_m = std::pow(2.0, bp.exponent);
        s.profile = ResidueProfile{2.0 * bp.period, bp.exponent, [bp, c, two_m](double t) {
                                       return bp.value(std::fmod(t, bp.period)) +
                                              c * two_m * bp.value(std::fmod(0.5 * t, bp.period));
                                   }};
    }
    return s;
}

inline Spectrum make_shannon() {
    Spectrum s("shannon", [](double g) -> cplx {
        bool in = (g >= 0.5 && g < 1.0) || (g >= -1.0 && g < -0.5);
        return {in ? 1.0 : 0.0, 0.0};
    });
    s.support_hint = Interval{-1.0, 1.0};
    s.inner_radius = 0.5;
    s.envelope = DecayEnvelope{2.0, 1.0};  // sup |psihat|(1+g^2) -> 2 as |g| -> 1
    return s;
}

namespace detail {

// Membership in B + C + D for the dyadic partition A_n = [1-2^{-n-1}, 1-2^{-n-2});
// frexp locates the unique candidate block, so the test is exact at dyadic points.
inline bool counterexample_member(int n_max, double g) {
    if (g > 0.0 && g < 1.0) {  // B = union of 2^{-n} A_n, block n sits in [2^{-n-1}, 2^{-n})
        int e;
        std::frexp(g, &e);
        int n = -e;
        if (n < 0 || n > n_max) return false;
        double lo = std::ldexp(1.0, -n) - std::ldexp(1.0, -2 * n - 1);
        double hi = std::ldexp(1.0, -n) - std::ldexp(1.0, -2 * n - 2);
        return g >= lo && g < hi;
    }
    if (g >= -1.0 && g < -0.5) {  // C = [-1,-1/2) minus the shifted blocks
        double t = g + 1.0;
        if (t <= 0.0) return true;
        int e;
        std::frexp(t, &e);
        int n = -e;
        if (n >= 1 && n <= n_max) {
            double lo = std::ldexp(1.0, -n) - std::ldexp(1.0, -2 * n - 1);
            double hi = std::ldexp(1.0, -n) - std::ldexp(1.0, -2 * n - 2);
            if (t >= lo && t < hi) return false;
        }
        return true;
    }
    if (g < -1.0) {  // D = union of A_n - 2^n, block n has |g| in (2^n - 1, 2^n - 1/2]
        int e;
        std::frexp(-g, &e);
        int n = e;
        if (n < 1 || n > n_max) return false;
        double x = g + std::ldexp(1.0, n);
        return x >= 1.0 - std::ldexp(1.0, -n - 1) && x < 1.0 - std::ldexp(1.0, -n - 2);
    }
    return false;
}

}  // namespace detail

inline Spectrum make_counterexample(int n_max) {
    if (n_max < 1) throw Error("counterexample spectrum: n_max must be >= 1");
    Spectrum s("counterexample:" + std::to_string(n_max), [n_max](double g) -> cplx {
        return {detail::counterexample_member(n_max, g) ? 1.0 : 0.0, 0.0};
    });
    s.support_hint = Interval{-std::ldexp(1.0, n_max), 1.0};
    // smallest positive support point is the left end of the n_max block of B
    s.inner_radius = std::ldexp(1.0, -n_max) - std::ldexp(1.0, -2 * n_max - 1);
    return s;
}

struct GeneratorInfo {
    Spectrum spectrum;
    std::optional<double> default_lower_bound;  // frame bound A when the system is known to have one
    std::optional<double> default_sigma;        // envelope decay rate natural for the generator
};

namespace detail {

inline bool parse_int(const std::string& s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_real(const std::string& s, double& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

inline GeneratorInfo make_generator_uncached(const std::string& id) {
    auto bad = [&]() -> Error { return Error("unknown generator id: " + id); };
    if (id == "shannon") return {make_shannon(), 1.0, 1.0};
    if (id.rfind("bspline:", 0) == 0) {
        int m;
        if (!parse_int(id.substr(8), m) || m < 1) throw bad();
        return {make_bspline(m), std::nullopt,
                m >= 2 ? std::optional<double>(m - 1) : std::nullopt};
    }
    if (id.rfind("battle-lemarie:", 0) == 0) {
        int m;
        if (!parse_int(id.substr(15), m) || m < 1) throw bad();
        return {make_battle_lemarie(m), 1.0,
                m >= 2 ? std::optional<double>(m - 1) : std::nullopt};
    }
    if (id == "counterexample") return {make_counterexample(24), std::nullopt, 1.0};
    if (id.rfind("counterexample:", 0) == 0) {
        int n;
        if (!parse_int(id.substr(15), n) || n < 1) throw bad();
        return {make_counterexample(n), std::nullopt, 1.0};
    }
    if (id.rfind("perturbed:", 0) == 0) {
        auto cut = id.find_last_of(':');
        if (cut <= 10) throw bad();
        double eta;
        if (!parse_real(id.substr(cut + 1), eta) || !(eta > 0.0 && eta < 1.0)) throw bad();
        GeneratorInfo base = make_generator_uncached(id.substr(10, cut - 10));
        std::optional<double> A;
        if (base.default_lower_bound && *base.default_lower_bound == 1.0)
            A = (1.0 - eta) * (1.0 - eta);  // perturbation of an orthonormal basis
        Spectrum s = perturbed_spectrum(base.spectrum, eta);
        s.rename(id);
        return {std::move(s), A, base.default_sigma};
    }
    throw bad();
}

}  // namespace detail

inline GeneratorInfo make_generator(const std::string& id) {
    static std::mutex mu;
    static std::map<std::string, GeneratorInfo> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(id);
    if (it == cache.end()) it = cache.emplace(id, detail::make_generator_uncached(id)).first;
    return it->second;
}

}  // namespace wframe
