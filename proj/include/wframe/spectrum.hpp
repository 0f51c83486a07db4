#pragma once
// Fourier-domain representation of a generator: analytic closure or sampled
// grid, plus the metadata the lattice sums need to control their tails
// (decay envelope toward infinity, zero bound / inner radius toward 0).
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace wframe {

struct FrameParams {
    double a;  // dilation, a > 1
    double b;  // translation step, b > 0
    FrameParams(double a_, double b_) : a(a_), b(b_) {
        if (!(a > 1.0)) throw Error("FrameParams: need a > 1");
        if (!(b > 0.0)) throw Error("FrameParams: need b > 0");
    }
};

// |psihat(gamma)| <= C / (1 + |gamma|^{1+sigma})
struct DecayEnvelope {
    double C;
    double sigma;
    DecayEnvelope(double C_, double sigma_) : C(C_), sigma(sigma_) {
        if (!(C > 0.0)) throw Error("DecayEnvelope: need C > 0");
        if (!(sigma > 0.0)) throw Error("DecayEnvelope: need sigma > 0");
    }
    double at(double gamma) const { return C / (1.0 + std::pow(std::abs(gamma), 1.0 + sigma)); }
};

struct Interval {
    double lo, hi;
};

// |psihat(gamma)| <= scale * |gamma|^power for |gamma| <= radius.
struct ZeroBound {
    double scale, power, radius;
};

// Certified bound profile: |psihat(gamma)| * |gamma|^exponent <= value(|gamma| mod period)
// for all gamma != 0. Lets an envelope fit be certified beyond any probe range.
struct ResidueProfile {
    double period;
    double exponent;
    std::function<double(double)> value;
};

class Spectrum {
public:
    // analytic form
    Spectrum(std::string name, std::function<cplx(double)> fn)
        : name_(std::move(name)), fn_(std::move(fn)) {}

    // sampled grid over [-gamma_max, gamma_max]; linear interpolation between samples
    static Spectrum sampled(std::string name, double gamma_max, double step, std::vector<cplx> values) {
        if (!(gamma_max > 0.0) || !(step > 0.0)) throw Error("sampled spectrum: bad grid");
        if (values.size() % 2 == 0 || values.size() < 3) throw Error("sampled spectrum: need odd sample count");
        double span = step * static_cast<double>(values.size() - 1);
        if (std::abs(span - 2.0 * gamma_max) > 1e-9 * std::max(1.0, gamma_max))
            throw Error("sampled spectrum: grid does not cover [-gamma_max, gamma_max]");
        Spectrum s(std::move(name), nullptr);
        s.grid_values_ = std::move(values);
        s.grid_max_ = gamma_max;
        s.grid_step_ = step;
        // trim the support to the nonzero extent of the samples (one cell of
        // margin for interpolation); detect the zero gap around gamma = 0
        const auto& v = s.grid_values_;
        std::size_t first = v.size(), last = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != cplx{0.0, 0.0}) {
                if (first == v.size()) first = i;
                last = i;
            }
        if (first == v.size()) {
            s.support_hint = Interval{0.0, 0.0};
            s.inner_radius = gamma_max;
        } else {
            // zero-padded edges are evidence of compact support; samples running
            // to the boundary are not, so no support claim is derived then
            if (first > 0 && last < v.size() - 1)
                s.support_hint = Interval{-gamma_max + step * static_cast<double>(first - 1),
                                          -gamma_max + step * static_cast<double>(last + 1)};
            std::size_t center = (v.size() - 1) / 2;
            std::size_t d = 0;
            while (center >= d && center + d < v.size() && v[center - d] == cplx{0.0, 0.0} &&
                   v[center + d] == cplx{0.0, 0.0})
                ++d;
            if (d > 1) s.inner_radius = step * static_cast<double>(d - 1);
        }
        return s;
    }

    cplx operator()(double gamma) const {
        if (support_hint && (gamma < support_hint->lo || gamma > support_hint->hi)) return {0.0, 0.0};
        if (std::abs(gamma) < inner_radius) return {0.0, 0.0};
        if (!grid_values_.empty()) {
            if (std::abs(gamma) > grid_max_) {
                // support_hint covers the usual case; a declared envelope means the
                // tail is treated as 0 here and enters bounds only.
                if (envelope) return {0.0, 0.0};
                throw OutOfRange("sampled spectrum evaluated at |gamma| > gamma_max without envelope");
            }
            double pos = (gamma + grid_max_) / grid_step_;
            auto n = static_cast<std::size_t>(grid_values_.size() - 1);
            if (pos <= 0.0) return grid_values_.front();
            if (pos >= static_cast<double>(n)) return grid_values_.back();
            auto i = static_cast<std::size_t>(pos);
            double t = pos - static_cast<double>(i);
            return grid_values_[i] * (1.0 - t) + grid_values_[i + 1] * t;
        }
        return fn_(gamma);
    }

    bool is_sampled() const { return !grid_values_.empty(); }
    double grid_max() const { return grid_max_; }
    double grid_step() const { return grid_step_; }
    const std::vector<cplx>& grid_values() const { return grid_values_; }
    const std::string& name() const { return name_; }
    void rename(std::string n) { name_ = std::move(n); }

    // metadata; all optional, consumed by the sum/tail machinery
    std::optional<DecayEnvelope> envelope;
    std::optional<Interval> support_hint;  // evaluation outside returns exactly 0
    double inner_radius = 0.0;             // evaluation inside |gamma| < r returns exactly 0
    std::optional<ZeroBound> zero_bound;
    std::optional<ResidueProfile> profile;

private:
    std::string name_;
    std::function<cplx(double)> fn_;
    std::vector<cplx> grid_values_;
    double grid_max_ = 0.0, grid_step_ = 0.0;
};

// Log-uniform samples of {gamma : 1 <= |gamma| <= a}, both signs, endpoints included.
struct AnnulusGrid {
    explicit AnnulusGrid(double a, int m_per_sign = 2048) {
        if (!(a > 1.0)) throw Error("AnnulusGrid: need a > 1");
        if (m_per_sign < 2) throw Error("AnnulusGrid: need at least 2 points per sign");
        points.reserve(2 * static_cast<std::size_t>(m_per_sign));
        for (int i = 0; i < m_per_sign; ++i) {
            double r = (i == 0) ? 1.0
                     : (i == m_per_sign - 1) ? a
                                             : std::pow(a, static_cast<double>(i) / static_cast<double>(m_per_sign - 1));
            points.push_back(r);
            points.push_back(-r);
        }
    }
    std::vector<double> points;
};

}  // namespace wframe
