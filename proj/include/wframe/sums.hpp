#pragma once
// Lattice sums over dilations a^j and translations k/b: the Calderon sum,
// the double cross-term sum, and the grid estimates for the frame bounds.
// Tail policy: support_hint / inner_radius cut index ranges exactly; a decay
// envelope (toward infinity) or zero bound (toward 0) cuts them with a
// geometric bound below tol; otherwise NoTailControl.
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "spectrum.hpp"

namespace wframe {

inline constexpr std::size_t sum_term_cap = 1000000;

namespace detail {

struct JRange {
    long long lo, hi;  // empty iff lo > hi
    bool empty() const { return lo > hi; }
};

inline long long floor_log(double x, double log_a) {
    return static_cast<long long>(std::floor(std::log(x) / log_a));
}

// Largest |a^j gamma| that still matters on the infinity side, as a j cut.
// p is the power on |psihat| in the summand, up_weight multiplies each term.
inline long long j_hi_cut(const Spectrum& s, double a, double abs_g, double p, double up_weight,
                          double tol, bool& empty_all) {
    double log_a = std::log(a);
    if (s.support_hint) {
        double S = std::max(std::abs(s.support_hint->lo), std::abs(s.support_hint->hi));
        if (S <= 0.0) {
            empty_all = true;
            return 0;
        }
        return floor_log(S / abs_g, log_a) + 1;
    }
    if (s.envelope) {
        // sum_{j>J} w*(C/(a^j g)^{1+sigma})^p <= w*C^p*(a^{J+1} g)^{-q}/(1-a^{-q}), q = p(1+sigma)
        double q = p * (1.0 + s.envelope->sigma);
        double num = up_weight * std::pow(s.envelope->C, p);
        if (num <= 0.0) {
            empty_all = true;
            return 0;
        }
        double need = num / (tol * (1.0 - std::pow(a, -q)));  // (a^{J+1} g)^q >= need
        double J = std::log(std::max(need, 1e-300)) / (q * log_a) - std::log(abs_g) / log_a - 1.0;
        return static_cast<long long>(std::ceil(J)) + 1;
    }
    throw NoTailControl("no decay control toward infinity: need envelope or support_hint");
}

// Smallest |a^j gamma| that still matters on the zero side, as a j cut.
inline long long j_lo_cut(const Spectrum& s, double a, double abs_g, double p, double down_weight,
                          double tol) {
    double log_a = std::log(a);
    if (s.inner_radius > 0.0) {
        // a^j |g| < inner_radius => term is exactly 0
        return floor_log(s.inner_radius / abs_g, log_a);
    }
    if (s.zero_bound) {
        // sum_{j<J} w*(Z (a^j g)^tau)^p <= w*Z^p*(a^{J-1} g)^{q}/(1-a^{-q}), q = p*tau,
        // valid once a^{J-1}|g| <= radius
        double q = p * s.zero_bound->power;
        double num = down_weight * std::pow(s.zero_bound->scale, p);
        if (num <= 0.0) return 0;
        double need = tol * (1.0 - std::pow(a, -q)) / num;  // (a^{J-1} g)^q <= need
        double J = std::log(std::max(need, 1e-300)) / (q * log_a) - std::log(abs_g) / log_a + 1.0;
        long long cut = static_cast<long long>(std::floor(J)) - 1;
        long long valid = floor_log(s.zero_bound->radius / abs_g, log_a) + 1;  // a^{J-1}|g| <= radius
        return std::min(cut, valid);
    }
    throw NoTailControl("no decay control toward zero: need inner_radius or zero_bound");
}

inline std::vector<long long> ordered_range(JRange r) {
    std::vector<long long> out;
    if (r.empty()) return out;
    out.reserve(static_cast<std::size_t>(r.hi - r.lo + 1));
    for (long long j = r.lo; j <= r.hi; ++j) out.push_back(j);
    std::stable_sort(out.begin(), out.end(), [](long long x, long long y) {
        auto ax = std::abs(x), ay = std::abs(y);
        return ax != ay ? ax < ay : x < y;
    });
    return out;
}

// sup_x sum_k |psihat(x + k/b)| from the envelope, integral comparison both sides.
inline double translation_sum_sup(const DecayEnvelope& env, double b) {
    return 2.0 * env.C * (1.0 + b * (1.0 + 1.0 / env.sigma));
}

}  // namespace detail

inline double calderon_sum(const Spectrum& spec, const FrameParams& params, double gamma,
                           double tol = 1e-10) {
    if (gamma == 0.0) throw Error("calderon_sum: gamma must be nonzero");
    if (!(tol > 0.0)) throw Error("calderon_sum: tol must be positive");
    double g = std::abs(gamma);
    bool empty = false;
    detail::JRange r{};
    r.hi = detail::j_hi_cut(spec, params.a, g, 2.0, 1.0, tol / 2.0, empty);
    if (empty) return 0.0;
    r.lo = detail::j_lo_cut(spec, params.a, g, 2.0, 1.0, tol / 2.0);
    if (static_cast<double>(r.hi - r.lo) > static_cast<double>(sum_term_cap))
        throw TruncationBudgetExceeded("calderon_sum: j range exceeds term cap");
    Kahan acc;
    for (long long j : detail::ordered_range(r)) {
        double v = std::abs(spec(std::pow(params.a, static_cast<double>(j)) * gamma));
        acc.add(v * v);
    }
    return acc.sum();
}

namespace detail {

// Double sum over j and k of |psihat(a^j g)| * |psihat(a^j g + k/b)|.
// include_k0 = false drops the k = 0 (Calderon) diagonal.
inline double cross_sum_impl(const Spectrum& spec, const FrameParams& params, double gamma,
                             double tol, bool include_k0) {
    double g = std::abs(gamma);
    double a = params.a, b = params.b;

    // weight on j tails: a certified sup of the inner k sum
    double f_sup = 0.0;
    bool have_f_sup = false;
    if (spec.envelope) {
        f_sup = translation_sum_sup(*spec.envelope, b);
        have_f_sup = true;
    }

    bool empty = false;
    JRange r{};
    if (spec.support_hint) {
        r.hi = j_hi_cut(spec, a, g, 1.0, 1.0, tol, empty);
        if (empty) return 0.0;
    } else if (have_f_sup) {
        r.hi = j_hi_cut(spec, a, g, 1.0, f_sup, tol / 4.0, empty);
        if (empty) return 0.0;
    } else {
        throw NoTailControl("cross_term_sum: no decay control toward infinity");
    }
    if (spec.inner_radius > 0.0) {
        r.lo = j_lo_cut(spec, a, g, 1.0, 1.0, tol);
    } else if (spec.zero_bound && have_f_sup) {
        r.lo = j_lo_cut(spec, a, g, 1.0, f_sup, tol / 4.0);
    } else {
        throw NoTailControl("cross_term_sum: no decay control toward zero");
    }
    if (r.empty()) return 0.0;
    if (static_cast<double>(r.hi - r.lo) > static_cast<double>(sum_term_cap))
        throw TruncationBudgetExceeded("cross_term_sum: j range exceeds term cap");

    // outer factors first; the k-tail budget is spread over the j terms that survive
    auto js = ordered_range(r);
    std::vector<double> w(js.size());
    Kahan wsum;
    for (std::size_t i = 0; i < js.size(); ++i) {
        w[i] = std::abs(spec(std::pow(a, static_cast<double>(js[i])) * gamma));
        wsum.add(w[i]);
    }
    double W = wsum.sum();
    if (W <= 0.0) return 0.0;
    double ktail_budget = (tol / 2.0) / W;  // per-j absolute k-sum truncation error

    std::size_t terms = 0;
    Kahan acc;
    for (std::size_t i = 0; i < js.size(); ++i) {
        if (w[i] == 0.0) continue;
        double x = std::pow(a, static_cast<double>(js[i])) * gamma;
        long long k_lo, k_hi;
        if (spec.support_hint) {
            k_lo = static_cast<long long>(std::ceil(b * (spec.support_hint->lo - x))) - 1;
            k_hi = static_cast<long long>(std::floor(b * (spec.support_hint->hi - x))) + 1;
        } else {
            // need 2C(b/sigma)t^{-sigma} + 2C t^{-1-sigma} < budget with |x + k/b| >= t
            double C = spec.envelope->C, sigma = spec.envelope->sigma;
            double t1 = std::pow(4.0 * C * b / (sigma * ktail_budget), 1.0 / sigma);
            double t2 = std::pow(4.0 * C / ktail_budget, 1.0 / (1.0 + sigma));
            double t = std::max({t1, t2, 1.0});
            auto span = static_cast<long long>(std::ceil(b * (t + std::abs(x)))) + 1;
            k_lo = -span;
            k_hi = span;
        }
        Kahan inner;
        std::vector<long long> ks;
        ks.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
        for (long long k = k_lo; k <= k_hi; ++k) ks.push_back(k);
        std::stable_sort(ks.begin(), ks.end(), [](long long p, long long q) {
            auto ap = std::abs(p), aq = std::abs(q);
            return ap != aq ? ap < aq : p < q;
        });
        for (long long k : ks) {
            if (!include_k0 && k == 0) continue;
            if (++terms > sum_term_cap) throw TruncationBudgetExceeded("cross_term_sum: term cap hit");
            inner.add(std::abs(spec(x + static_cast<double>(k) / b)));
        }
        acc.add(w[i] * inner.sum());
    }
    return acc.sum();
}

}  // namespace detail

inline double cross_term_sum(const Spectrum& spec, const FrameParams& params, double gamma,
                             double tol = 1e-8) {
    double g = std::abs(gamma);
    if (g < 1.0 - 1e-12 || g > params.a * (1.0 + 1e-12))
        throw OutOfRange("cross_term_sum: |gamma| must lie in [1, a]");
    if (!(tol > 0.0)) throw Error("cross_term_sum: tol must be positive");
    return detail::cross_sum_impl(spec, params, gamma, tol, true);
}

inline double bessel_bound_estimate(const Spectrum& spec, const FrameParams& params,
                                    const AnnulusGrid& grid, double tol = 1e-8) {
    double best = 0.0;
    for (double g : grid.points) best = std::max(best, detail::cross_sum_impl(spec, params, g, tol, true));
    return best / params.b;
}

inline double lower_bound_estimate(const Spectrum& spec, const FrameParams& params,
                                   const AnnulusGrid& grid, double tol = 1e-8) {
    double worst = std::numeric_limits<double>::infinity();
    for (double g : grid.points) {
        double cal = calderon_sum(spec, params, g, tol);
        double off = detail::cross_sum_impl(spec, params, g, tol, false);
        worst = std::min(worst, cal - off);
    }
    return worst / params.b;
}

// inf over the grid of sum_{j <= J0} |psihat(a^j gamma)|^2
inline double partial_calderon_inf(const Spectrum& spec, const FrameParams& params, long long J0,
                                   const AnnulusGrid& grid, double tol = 1e-10) {
    double worst = std::numeric_limits<double>::infinity();
    for (double g : grid.points) {
        double abs_g = std::abs(g);
        detail::JRange r{};
        r.lo = detail::j_lo_cut(spec, params.a, abs_g, 2.0, 1.0, tol);
        r.hi = J0;
        if (spec.support_hint) {
            bool empty = false;
            r.hi = std::min(r.hi, detail::j_hi_cut(spec, params.a, abs_g, 2.0, 1.0, tol, empty));
            if (empty) r.hi = r.lo - 1;
        }
        Kahan acc;
        for (long long j : detail::ordered_range(r)) {
            double v = std::abs(spec(std::pow(params.a, static_cast<double>(j)) * g));
            acc.add(v * v);
        }
        worst = std::min(worst, acc.sum());
    }
    return worst;
}

struct EnvelopeFit {
    DecayEnvelope env;
    bool certified;   // bound holds for all gamma, not just the probe grid
    bool degenerate;  // spectrum was (numerically) zero on the probe grid
};

// Smallest C with |psihat(gamma)|(1+|gamma|^{1+sigma}) <= C over a dense probe of
// [-gamma_probe_max, gamma_probe_max], extended past the probe by the support bound
// or the residue profile when available.
inline EnvelopeFit fit_decay_envelope(const Spectrum& spec, double sigma, double gamma_probe_max) {
    if (!(sigma > 0.0)) throw Error("fit_decay_envelope: sigma must be positive");
    if (!(gamma_probe_max > 0.0)) throw Error("fit_decay_envelope: probe range must be positive");

    auto h = [&](double g) { return std::abs(spec(g)) * (1.0 + std::pow(std::abs(g), 1.0 + sigma)); };

    // dense linear scan near the origin, log scan further out
    std::vector<double> xs;
    double lin_max = std::min(gamma_probe_max, 16.0);
    int n_lin = 16384;
    for (int i = 0; i <= n_lin; ++i) xs.push_back(lin_max * static_cast<double>(i) / n_lin);
    if (gamma_probe_max > lin_max) {
        int n_log = 8192;
        double lr = std::log(gamma_probe_max / lin_max);
        for (int i = 1; i <= n_log; ++i) xs.push_back(lin_max * std::exp(lr * static_cast<double>(i) / n_log));
    }

    double best = 0.0;
    std::vector<std::size_t> peaks;
    std::vector<double> hv(2 * xs.size());
    std::vector<double> gv(2 * xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        gv[2 * i] = xs[i];
        gv[2 * i + 1] = -xs[i];
        hv[2 * i] = h(xs[i]);
        hv[2 * i + 1] = h(-xs[i]);
    }
    for (std::size_t i = 0; i < gv.size(); ++i) best = std::max(best, hv[i]);
    // local refinement around interior grid maxima of the same sign sequence
    for (std::size_t i = 2; i + 2 < xs.size(); ++i) {
        for (int s : {0, 1}) {
            double cur = hv[2 * i + s];
            if (cur >= hv[2 * (i - 1) + s] && cur >= hv[2 * (i + 1) + s] && cur > 0.6 * best)
                peaks.push_back(2 * i + s);
        }
    }
    for (std::size_t p : peaks) {
        std::size_t i = p / 2;
        int s = static_cast<int>(p % 2);
        double sign = s == 0 ? 1.0 : -1.0;
        double lo = sign * xs[i - 1], hi = sign * xs[i + 1];
        if (lo > hi) std::swap(lo, hi);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = h(x1), f2 = h(x2);
        for (int it = 0; it < 120; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = h(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = h(x1);
            }
        }
        best = std::max({best, f1, f2});
    }

    // past the probe range
    double beyond = std::numeric_limits<double>::infinity();
    if (spec.support_hint) {
        double S = std::max(std::abs(spec.support_hint->lo), std::abs(spec.support_hint->hi));
        if (S <= gamma_probe_max) beyond = 0.0;
    }
    if (std::isinf(beyond) && spec.profile) {
        double m = spec.profile->exponent;
        if (sigma <= m - 1.0 + 1e-12) {
            // profile max over one period, densely scanned and locally refined
            double vmax = 0.0;
            int n = 8192;
            for (int i = 0; i <= n; ++i) {
                double t = spec.profile->period * static_cast<double>(i) / n;
                vmax = std::max(vmax, spec.profile->value(t));
            }
            vmax *= 1.0 + 1e-9;
            double G = gamma_probe_max;
            beyond = vmax * (std::pow(G, -m) + std::pow(G, 1.0 + sigma - m));
        }
    }

    bool certified = !std::isinf(beyond);
    // a sampled grid short of the probe range is merely flagged; an analytic
    // spectrum with no support bound or usable profile cannot be trusted at all
    if (!certified && !spec.is_sampled())
        throw EnvelopeUnsound("envelope fit cannot be certified beyond the probe range");
    double C = std::max(best * (1.0 + 1e-10), certified ? beyond : 0.0);
    bool degenerate = !(C > 0.0);
    if (degenerate) C = std::numeric_limits<double>::min();
    return EnvelopeFit{DecayEnvelope{C, sigma}, certified, degenerate};
}

}  // namespace wframe
