#pragma once
// Closed-form floors on reconstruction error for wavelet-structured approximate
// duals of a Riesz basis at the critical translation density. The floors are
// what oversampled constructions get around: they apply to equal-norm duals of
// the non-oversampled system only.
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wframe/common.hpp"

namespace wframe {

struct RieszDualData {
    double A = 0.0;  // lower frame bound of the Riesz basis
    std::vector<std::pair<std::string, double>> dual_norms;  // (index label, dual norm)
};

// Any Bessel substitute phi for the dual family pays sup-error^2 >= A * dist^2,
// where dist is its distance to the true dual member it replaces.
inline double deviation_floor(double A, double dist) {
    if (!(A > 0.0)) throw Error("deviation_floor requires A > 0");
    if (!(dist >= 0.0)) throw Error("deviation_floor requires dist >= 0");
    return A * dist * dist;
}

// Equal-norm substitutes cannot track dual norms that differ: some member sits
// at least delta/2 from its target, giving the floor A * (delta/2)^2.
inline double equal_norm_floor(const RieszDualData& data) {
    if (!(data.A > 0.0)) throw Error("equal_norm_floor requires A > 0");
    if (data.dual_norms.empty()) throw Error("equal_norm_floor requires at least one dual norm");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& [label, norm] : data.dual_norms) {
        if (!(norm > 0.0)) throw Error("dual norm for " + label + " must be positive");
        lo = std::min(lo, norm);
        hi = std::max(hi, norm);
    }
    double delta = hi - lo;
    return data.A * delta * delta / 4.0;
}

// Perturbed orthonormal wavelet basis theta = psi + eta D_2 psi: the dual norms
// split into (1-eta^2)^{-1/2} on the k=0 line and 1 elsewhere, with lower frame
// bound A = (1-eta)^2.
inline RieszDualData daubechies_example_norms(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw Error("eta must lie in (0,1)");
    RieszDualData d;
    d.A = (1.0 - eta) * (1.0 - eta);
    d.dual_norms = {{"(0,0)", 1.0 / std::sqrt(1.0 - eta * eta)},
                    {"(0,1)", 1.0}};
    return d;
}

// ((1-eta)^2/4) (1/sqrt(1-eta^2) - 1)^2, the equal-norm floor of the example.
inline double nogo_floor(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw Error("eta must lie in (0,1)");
    double A = (1.0 - eta) * (1.0 - eta);
    double gap = 1.0 / std::sqrt(1.0 - eta * eta) - 1.0;
    return A * gap * gap / 4.0;
}

}  // namespace wframe
