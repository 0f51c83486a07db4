#pragma once
// Approximate-dual construction: truncate the generator in frequency, pick the
// odd oversampling factor N, build the dual generator, and evaluate the
// closed-form error quantities R_K, epsilon_K and the reconstruction bound.
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "wframe/sums.hpp"

namespace wframe {

// psihat_K = psihat restricted to [-K, K], exactly zero outside. Metadata that
// upper-bounds |psihat| stays valid for the truncation and is copied through.
inline Spectrum truncate_spectrum(const Spectrum& spec, double K) {
    if (!(K > 0.0)) throw Error("truncation half-width K must be positive");
    if (spec.is_sampled() && K > spec.grid_max() && !spec.envelope && !spec.support_hint)
        throw OutOfRange("sampled spectrum is not evaluable on [-K, K]");
    Spectrum base = spec;
    Spectrum out(spec.name() + "-trunc", [base, K](double g) -> cplx {
        if (std::abs(g) > K) return {0.0, 0.0};
        return base(g);
    });
    if (spec.support_hint) {
        double lo = std::max(spec.support_hint->lo, -K);
        double hi = std::min(spec.support_hint->hi, K);
        out.support_hint = (lo <= hi) ? Interval{lo, hi} : Interval{0.0, 0.0};
    } else {
        out.support_hint = Interval{-K, K};
    }
    out.inner_radius = spec.inner_radius;
    out.envelope = spec.envelope;
    out.zero_bound = spec.zero_bound;
    out.profile = spec.profile;
    return out;
}

// The unique odd N with N-2 <= 2bK < N, i.e. the odd integer in (2bK, 2bK+2].
inline long long select_oversampling(double b, double K) {
    if (!(b > 0.0) || !(K > 0.0)) throw Error("select_oversampling requires b > 0 and K > 0");
    double half = (2.0 * b * K - 1.0) / 2.0;
    return 2 * static_cast<long long>(std::floor(half)) + 3;
}

struct DualResult {
    Spectrum spectrum;
    bool degenerate = false;  // input vanished identically; dual is the zero spectrum
};

// Dual generator: b * psihat_K(gamma) / (N * sum_j |psihat_K(a^j gamma)|^2).
// The denominator is probed on the annulus before returning: Calderon sums are
// dilation invariant, so a low value at any probe point means the truncated
// system cannot be a frame and the dual would blow up there.
inline DualResult dual_spectrum(const Spectrum& trunc, const FrameParams& params, long long N,
                                double denom_tol = 0.0) {
    if (N < 1 || N % 2 == 0) throw Error("oversampling factor N must be a positive odd integer");
    if (denom_tol <= 0.0) denom_tol = 1e-9 * params.b / static_cast<double>(N);
    double sum_tol = std::min(1e-12, 1e-3 * denom_tol);

    AnnulusGrid probe(params.a, 512);
    bool any_value = false;
    double min_cal = std::numeric_limits<double>::infinity();
    double argmin = probe.points.front();
    for (double g : probe.points) {
        if (std::abs(trunc(g)) > 0.0) any_value = true;
        double cal = calderon_sum(trunc, params, g, sum_tol);
        if (cal < min_cal) {
            min_cal = cal;
            argmin = g;
        }
    }
    if (min_cal < denom_tol) {
        if (!any_value && min_cal == 0.0) {
            Spectrum zero(trunc.name() + "-dual", [](double) { return cplx{0.0, 0.0}; });
            zero.support_hint = trunc.support_hint;
            zero.inner_radius = trunc.inner_radius;
            return {std::move(zero), true};
        }
        throw DenominatorVanishes(argmin);
    }

    Spectrum base = trunc;
    FrameParams p = params;
    double scale = params.b / static_cast<double>(N);
    Spectrum out(trunc.name() + "-dual", [base, p, scale, sum_tol, denom_tol](double g) -> cplx {
        cplx v = base(g);
        if (v == cplx{0.0, 0.0}) return v;
        double cal = calderon_sum(base, p, g, sum_tol);
        if (cal < denom_tol) throw DenominatorVanishes(g);
        return (scale / cal) * v;
    });
    out.support_hint = trunc.support_hint;
    out.inner_radius = trunc.inner_radius;
    return {std::move(out), false};
}

// Bessel bound of the frequency tail {D_{a^j} T_{kb} (psi - psi_K)}:
// (2C^2 / (sigma K^{1+2sigma})) (sigma/K + b) a^{1+sigma}/(a^{1+sigma} - 1).
inline double tail_bessel_bound(const DecayEnvelope& env, const FrameParams& params, double K) {
    if (!(K > 0.0)) throw Error("tail_bessel_bound requires K > 0");
    double C = env.C, s = env.sigma;
    double afac = std::pow(params.a, 1.0 + s);
    return (2.0 * C * C / (s * std::pow(K, 1.0 + 2.0 * s))) * (s / K + params.b) * afac / (afac - 1.0);
}

// R_K = (4C^2 / K^{2+2sigma}) (K + 1/b) (1 + 1/(2sigma)) a^{1+sigma}/(a^{1+sigma} - 1),
// the Bessel bound of the oversampled tail system at translation step b/N.
inline double compute_RK(const DecayEnvelope& env, const FrameParams& params, long long K) {
    if (K < 1) throw Error("compute_RK requires K >= 1");
    double C = env.C, s = env.sigma, k = static_cast<double>(K);
    double afac = std::pow(params.a, 1.0 + s);
    return (4.0 * C * C / std::pow(k, 2.0 + 2.0 * s)) * (k + 1.0 / params.b) *
           (1.0 + 1.0 / (2.0 * s)) * afac / (afac - 1.0);
}

// epsilon_K = sqrt(R_K / K), written in closed form.
inline double compute_epsilonK(const DecayEnvelope& env, const FrameParams& params, long long K) {
    if (K < 1) throw Error("compute_epsilonK requires K >= 1");
    double C = env.C, s = env.sigma, k = static_cast<double>(K);
    double afac = std::pow(params.a, 1.0 + s);
    return std::sqrt((k + 1.0 / params.b) / std::pow(k, 3.0 + 2.0 * s)) * 2.0 * C *
           std::sqrt((1.0 + 1.0 / (2.0 * s)) * afac / (afac - 1.0));
}

// Reconstruction error: ||f - sum <f, psi_jk> dual_jk|| <= eps/(sqrt(2bA) - eps) ||f||.
inline double error_bound(double epsilon_K, double A, double b) {
    if (!(A > 0.0) || !(b > 0.0)) throw Error("error_bound requires A > 0 and b > 0");
    if (epsilon_K < 0.0) throw Error("error_bound requires epsilon_K >= 0");
    double root = std::sqrt(2.0 * b * A);
    if (epsilon_K >= root)
        throw BoundInapplicable("epsilon_K >= sqrt(2bA): truncation too coarse for the bound");
    return epsilon_K / (root - epsilon_K);
}

struct FeasibilityReport {
    bool pass = false;
    double min_value = 0.0;
    double argmin_gamma = 0.0;
};

// Necessary condition for any truncation to generate a frame: the Calderon sum
// of psi_K must stay bounded away from zero on the annulus. Reports, never throws
// on failure (callers decide whether a fail is fatal).
inline FeasibilityReport check_feasibility(const Spectrum& spec, const FrameParams& params, double K,
                                           const AnnulusGrid& grid, double tol = 1e-9) {
    Spectrum trunc = truncate_spectrum(spec, K);
    double sum_tol = std::min(1e-12, tol > 0.0 ? 1e-3 * tol : 1e-12);
    FeasibilityReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    for (double g : grid.points) {
        double cal = calderon_sum(trunc, params, g, sum_tol);
        if (cal < rep.min_value) {
            rep.min_value = cal;
            rep.argmin_gamma = g;
        }
    }
    rep.pass = rep.min_value >= tol;
    return rep;
}

struct ApproxDualPlan {
    long long K = 0;
    long long N = 0;
    double A = 0.0;
    double R_K = 0.0;
    double epsilon_K = 0.0;
    double error_bound = 0.0;
    double oversampled_lower_bound = 0.0;  // A N: lower bound of the N-fold oversampled frame
    double perturbed_lower_bound = 0.0;    // A N (1 - sqrt(R_K/(2bAK)))^2: survives truncation
    FrameParams params{2.0, 1.0};
    DecayEnvelope envelope{1.0, 1.0};
    std::string generator;
    FeasibilityReport feasibility;
};

inline ApproxDualPlan plan_for_K(const Spectrum& spec, const FrameParams& params, double A,
                                 const DecayEnvelope& env, long long K, bool require_feasible = false) {
    if (K < 1) throw Error("plans require an integer K >= 1");
    if (!(A > 0.0)) throw Error("lower frame bound A must be positive");
    ApproxDualPlan plan;
    plan.K = K;
    plan.N = select_oversampling(params.b, static_cast<double>(K));
    plan.A = A;
    plan.params = params;
    plan.envelope = env;
    plan.generator = spec.name();
    plan.R_K = compute_RK(env, params, K);
    plan.epsilon_K = compute_epsilonK(env, params, K);
    plan.error_bound = error_bound(plan.epsilon_K, A, params.b);
    plan.oversampled_lower_bound = A * static_cast<double>(plan.N);
    double dip = std::sqrt(plan.R_K / (2.0 * params.b * A * static_cast<double>(K)));
    plan.perturbed_lower_bound = plan.oversampled_lower_bound * (1.0 - dip) * (1.0 - dip);
    plan.feasibility = check_feasibility(spec, params, static_cast<double>(K), AnnulusGrid(params.a, 512),
                                         1e-9 * params.b / static_cast<double>(plan.N));
    if (require_feasible && !plan.feasibility.pass)
        throw FrameConditionViolated("truncated Calderon sum vanishes near gamma=" +
                                     fmt_double(plan.feasibility.argmin_gamma) + " (min " +
                                     fmt_double(plan.feasibility.min_value) + ")");
    return plan;
}

// Smallest integer K whose reconstruction bound meets eps_target. epsilon_K is
// strictly decreasing in K (d/dK of (K+1/b)/K^{3+2sigma} < 0), so the predicate
// "bound applicable and <= target" is monotone; a linear scan covers small K and
// bisection takes over beyond 10^6 so absurd targets fail fast at the cap.
inline ApproxDualPlan plan_for_target(const Spectrum& spec, const FrameParams& params, double A,
                                      const DecayEnvelope& env, double eps_target,
                                      long long K_cap = (1LL << 32), bool require_feasible = false) {
    if (!(eps_target > 0.0)) throw Error("eps_target must be positive");
    if (K_cap < 1) throw Error("K cap must be at least 1");
    if (!(A > 0.0)) throw Error("lower frame bound A must be positive");
    double root = std::sqrt(2.0 * params.b * A);
    auto ok = [&](long long K) {
        double eps = compute_epsilonK(env, params, K);
        return eps < root && eps / (root - eps) <= eps_target;
    };
    long long scan_limit = std::min<long long>(K_cap, 1000000);
    for (long long K = 1; K <= scan_limit; ++K)
        if (ok(K)) return plan_for_K(spec, params, A, env, K, require_feasible);
    if (K_cap <= scan_limit || !ok(K_cap))
        throw TargetUnreachable("no K <= " + fmt_int(K_cap) + " meets error target " +
                                fmt_double(eps_target));
    long long lo = scan_limit + 1, hi = K_cap;
    while (lo < hi) {
        long long mid = lo + (hi - lo) / 2;
        if (ok(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return plan_for_K(spec, params, A, env, lo, require_feasible);
}

}  // namespace wframe
