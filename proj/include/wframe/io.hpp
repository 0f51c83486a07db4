#pragma once

// File formats shared by the command-line tool and its tests: spectrum sample
// tables (CSV with header "gamma,re,im"), approximate-dual plans (JSON), and
// the verify/sweep/nogo tables. Doubles are written in shortest round-trip
// form, so equal inputs produce byte-identical files and read-back is exact.
//
// plan_from_json re-derives every closed-form field from (envelope, a, b, K)
// and rejects mismatches beyond 1e-12 relative: a hand-edited plan cannot
// smuggle a weaker epsilon_K or error_bound past verification. error_bound is
// null in JSON (NaN in memory) exactly when epsilon_K >= sqrt(2bA), where the
// reconstruction bound says nothing even though the dual itself is fine.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wframe/approx_dual.hpp"
#include "wframe/common.hpp"
#include "wframe/nogo.hpp"
#include "wframe/spectrum.hpp"

namespace wframe {

using json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write failed: " + path);
}

inline json read_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

namespace detail {

inline bool parse_field_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = first + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

inline double num_field(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw Error(std::string("plan: missing numeric field ") + key);
    return j.at(key).get<double>();
}

inline long long int_field(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw Error(std::string("plan: missing integer field ") + key);
    return j.at(key).get<long long>();
}

inline bool close_rel(double x, double y, double tol) {
    return std::abs(x - y) <= tol * std::max({std::abs(x), std::abs(y), 1e-300});
}

}  // namespace detail

// Samples spec on the uniform grid over [-gamma_max, gamma_max]. The step must
// divide the span into an even number of cells so the file reads back as a
// valid sampled spectrum (odd count, gamma = 0 on a node).
inline void write_spectrum_csv(const std::string& path, const Spectrum& spec, double gamma_max,
                               double step) {
    if (!(gamma_max > 0.0) || !(step > 0.0)) throw Error("spectrum csv: bad grid");
    double raw = 2.0 * gamma_max / step;
    long long cells = std::llround(raw);
    if (cells < 2 || std::abs(raw - static_cast<double>(cells)) > 1e-9 * std::max(raw, 1.0))
        throw Error("spectrum csv: step must divide the grid span");
    if (cells % 2 != 0) throw Error("spectrum csv: need an even cell count (odd sample count)");
    std::string out;
    out.reserve(static_cast<std::size_t>(cells + 1) * 24 + 16);
    out += "gamma,re,im\n";
    for (long long i = 0; i <= cells; ++i) {
        double g = -gamma_max + step * static_cast<double>(i);
        cplx v = spec(g);
        out += fmt_double(g);
        out += ',';
        out += fmt_double(v.real());
        out += ',';
        out += fmt_double(v.imag());
        out += '\n';
    }
    write_text_file(path, out);
}

struct SpectrumCsv {
    Spectrum spectrum;
    double gamma_max = 0.0;
    double step = 0.0;
    std::size_t rows = 0;
};

// Strict reader for the format above: exact header, three numeric columns,
// uniform strictly increasing gamma grid symmetric about 0, odd row count.
// The table is the whole spectrum, so values off the grid are zero: a support
// hint covering the grid is supplied when the samples alone do not imply one.
inline SpectrumCsv read_spectrum_csv(const std::string& path, const std::string& name = "csv") {
    std::string text = read_text_file(path);
    std::vector<double> gammas;
    std::vector<cplx> values;
    bool saw_header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::size_t end = (nl == std::string::npos) ? text.size() : nl;
        std::string_view line(text.data() + pos, end - pos);
        pos = (nl == std::string::npos) ? text.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "gamma,re,im") throw Error(path + ": bad header, want gamma,re,im");
            saw_header = true;
            continue;
        }
        std::size_t c1 = line.find(',');
        std::size_t c2 = (c1 == std::string_view::npos) ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
            throw Error(path + ": row needs exactly three columns");
        double g = 0.0, re = 0.0, im = 0.0;
        if (!detail::parse_field_double(line.substr(0, c1), g) ||
            !detail::parse_field_double(line.substr(c1 + 1, c2 - c1 - 1), re) ||
            !detail::parse_field_double(line.substr(c2 + 1), im))
            throw Error(path + ": bad number in row");
        gammas.push_back(g);
        values.push_back({re, im});
    }
    if (!saw_header) throw Error(path + ": empty file");
    if (gammas.size() < 3 || gammas.size() % 2 == 0)
        throw Error(path + ": need an odd number of rows, at least 3");
    double step = (gammas.back() - gammas.front()) / static_cast<double>(gammas.size() - 1);
    if (!(step > 0.0)) throw Error(path + ": gamma must increase");
    for (std::size_t i = 1; i < gammas.size(); ++i)
        if (std::abs(gammas[i] - gammas[i - 1] - step) > 1e-9 * std::max(1.0, step))
            throw Error(path + ": non-uniform gamma grid");
    if (std::abs(gammas.front() + gammas.back()) > 1e-9 * std::max(1.0, gammas.back()))
        throw Error(path + ": gamma grid not symmetric about 0");
    double gamma_max = gammas.back();
    Spectrum spec = Spectrum::sampled(name, gamma_max, step, std::move(values));
    if (!spec.support_hint) spec.support_hint = Interval{-gamma_max, gamma_max};
    return SpectrumCsv{std::move(spec), gamma_max, step, gammas.size()};
}

inline json plan_to_json(const ApproxDualPlan& plan) {
    json j;
    j["generator"] = plan.generator;
    j["a"] = plan.params.a;
    j["b"] = plan.params.b;
    j["A"] = plan.A;
    j["K"] = plan.K;
    j["N"] = plan.N;
    j["envelope"] = {{"C", plan.envelope.C}, {"sigma", plan.envelope.sigma}};
    j["R_K"] = plan.R_K;
    j["epsilon_K"] = plan.epsilon_K;
    if (std::isnan(plan.error_bound))
        j["error_bound"] = nullptr;
    else
        j["error_bound"] = plan.error_bound;
    j["oversampled_lower_bound"] = plan.oversampled_lower_bound;
    j["perturbed_lower_bound"] = plan.perturbed_lower_bound;
    j["feasibility"] = {{"pass", plan.feasibility.pass},
                        {"min_value", plan.feasibility.min_value},
                        {"argmin_gamma", plan.feasibility.argmin_gamma}};
    return j;
}

inline ApproxDualPlan plan_from_json(const json& j) {
    ApproxDualPlan plan;
    if (!j.contains("generator") || !j.at("generator").is_string())
        throw Error("plan: missing generator name");
    plan.generator = j.at("generator").get<std::string>();
    plan.params = FrameParams(detail::num_field(j, "a"), detail::num_field(j, "b"));
    plan.A = detail::num_field(j, "A");
    if (!(plan.A > 0.0)) throw Error("plan: A must be positive");
    plan.K = detail::int_field(j, "K");
    plan.N = detail::int_field(j, "N");
    if (plan.K < 1) throw Error("plan: K must be at least 1");
    if (plan.N != select_oversampling(plan.params.b, static_cast<double>(plan.K)))
        throw Error("plan: N violates the oversampling rule");
    if (!j.contains("envelope") || !j.at("envelope").is_object())
        throw Error("plan: missing envelope object");
    const json& env = j.at("envelope");
    plan.envelope = DecayEnvelope(detail::num_field(env, "C"), detail::num_field(env, "sigma"));

    plan.R_K = detail::num_field(j, "R_K");
    plan.epsilon_K = detail::num_field(j, "epsilon_K");
    if (!detail::close_rel(plan.R_K, compute_RK(plan.envelope, plan.params, plan.K), 1e-12))
        throw Error("plan: R_K does not match the envelope closed form");
    if (!detail::close_rel(plan.epsilon_K, std::sqrt(plan.R_K / static_cast<double>(plan.K)), 1e-12))
        throw Error("plan: epsilon_K != sqrt(R_K / K)");

    double root = std::sqrt(2.0 * plan.params.b * plan.A);
    if (j.contains("error_bound") && j.at("error_bound").is_null()) {
        if (plan.epsilon_K < root)
            throw Error("plan: error_bound missing although epsilon_K < sqrt(2bA)");
        plan.error_bound = std::numeric_limits<double>::quiet_NaN();
    } else {
        plan.error_bound = detail::num_field(j, "error_bound");
        if (!(plan.epsilon_K < root) ||
            !detail::close_rel(plan.error_bound, plan.epsilon_K / (root - plan.epsilon_K), 1e-12))
            throw Error("plan: error_bound does not match epsilon_K/(sqrt(2bA)-epsilon_K)");
    }

    plan.oversampled_lower_bound = detail::num_field(j, "oversampled_lower_bound");
    if (!detail::close_rel(plan.oversampled_lower_bound, plan.A * static_cast<double>(plan.N), 1e-12))
        throw Error("plan: oversampled_lower_bound != A*N");
    plan.perturbed_lower_bound = detail::num_field(j, "perturbed_lower_bound");
    double dip = std::sqrt(plan.R_K / (2.0 * plan.params.b * plan.A * static_cast<double>(plan.K)));
    if (!detail::close_rel(plan.perturbed_lower_bound,
                           plan.oversampled_lower_bound * (1.0 - dip) * (1.0 - dip), 1e-12))
        throw Error("plan: perturbed_lower_bound does not match A*N*(1-sqrt(R_K/(2bAK)))^2");

    if (!j.contains("feasibility") || !j.at("feasibility").is_object())
        throw Error("plan: missing feasibility object");
    const json& fz = j.at("feasibility");
    if (!fz.contains("pass") || !fz.at("pass").is_boolean())
        throw Error("plan: feasibility needs a boolean pass");
    plan.feasibility.pass = fz.at("pass").get<bool>();
    plan.feasibility.min_value = detail::num_field(fz, "min_value");
    plan.feasibility.argmin_gamma = detail::num_field(fz, "argmin_gamma");
    return plan;
}

struct VerifyRow {
    long long seed = 0;
    long long K = 0;
    long long N = 0;
    double relative_error = 0.0;
    double tail_budget = 0.0;
    double theoretical_bound = 0.0;  // NaN when the closed-form bound is inapplicable
    bool pass = false;
};

inline std::string verify_csv(const std::vector<VerifyRow>& rows) {
    std::string out = "seed,K,N,relative_error,tail_budget,theoretical_bound,pass\n";
    for (const auto& r : rows) {
        out += fmt_int(r.seed);
        out += ',';
        out += fmt_int(r.K);
        out += ',';
        out += fmt_int(r.N);
        out += ',';
        out += fmt_double(r.relative_error);
        out += ',';
        out += fmt_double(r.tail_budget);
        out += ',';
        out += fmt_double(r.theoretical_bound);
        out += ',';
        out += r.pass ? '1' : '0';
        out += '\n';
    }
    return out;
}

struct SweepRow {
    long long K = 0;
    long long N = 0;
    double epsilon_K = 0.0;
    double bound = 0.0;    // NaN when inapplicable
    double measured = 0.0;  // max relative error over the seeded signals
    double tail_budget = 0.0;
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "K,N,epsilon_K,bound,measured,tail_budget\n";
    for (const auto& r : rows) {
        out += fmt_int(r.K);
        out += ',';
        out += fmt_int(r.N);
        out += ',';
        out += fmt_double(r.epsilon_K);
        out += ',';
        out += fmt_double(r.bound);
        out += ',';
        out += fmt_double(r.measured);
        out += ',';
        out += fmt_double(r.tail_budget);
        out += '\n';
    }
    return out;
}

struct NogoRow {
    double eta = 0.0;
    double A = 0.0;
    double delta = 0.0;  // spread of the dual norms
    double floor_value = 0.0;
    double sqrt_floor = 0.0;
};

inline NogoRow nogo_row(double eta) {
    RieszDualData data = daubechies_example_norms(eta);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& [label, norm] : data.dual_norms) {
        (void)label;
        lo = std::min(lo, norm);
        hi = std::max(hi, norm);
    }
    NogoRow r;
    r.eta = eta;
    r.A = data.A;
    r.delta = hi - lo;
    r.floor_value = nogo_floor(eta);
    r.sqrt_floor = std::sqrt(r.floor_value);
    return r;
}

inline json nogo_to_json(const std::vector<NogoRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"eta", r.eta},
                       {"A", r.A},
                       {"delta", r.delta},
                       {"floor", r.floor_value},
                       {"sqrt_floor", r.sqrt_floor}});
    return arr;
}

}  // namespace wframe
