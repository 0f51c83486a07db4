// wframe: deterministic construction and verification of approximately dual
// wavelet frames built from truncated, oversampled generators.
//
// usage: wframe <analyze|construct|verify|sweep|nogo> [options]
//   --config <path>     JSON run configuration (schema in README)
//   --out <dir>         output directory (default from config, else ".")
//   --seed <int>        base seed for the signal batch
//   --eps <real>        construct: target reconstruction error (excludes --K)
//   --K <int[,int...]>  construct: truncation radius; sweep: ascending K list
//   --eta <real[,...]>  nogo: deviation parameters (repeatable)
//
// exit codes: 0 success, 2 bad config/schema/file, 3 no tail control,
//             4 frame condition violated, 5 target unreachable,
//             6 reconstruction bound violated.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wframe/generators.hpp"
#include "wframe/io.hpp"
#include "wframe/reconstruct.hpp"
#include "wframe/signal.hpp"
#include "wframe/sums.hpp"

namespace {

namespace fs = std::filesystem;
using wframe::Error;
using wframe::json;

// Relative reconstruction error a plan without an applicable closed-form bound
// must still meet: the dual is exact up to quadrature in that regime.
constexpr double exact_pass_tol = 1e-9;

// Tail allowance for the analyze estimates. Envelope-driven translation
// windows grow like 1/tol at sigma = 1, so a tighter setting buys little
// accuracy for a large term-count cost.
constexpr double estimate_tol = 1e-3;

[[noreturn]] void usage_error(const std::string& msg) {
    throw Error(msg +
                "\nusage: wframe <analyze|construct|verify|sweep|nogo>"
                " [--config <path>] [--out <dir>] [--seed <n>] [--eps <x>]"
                " [--K <list>] [--eta <list>]");
}

bool parse_ll(std::string_view s, long long& out) {
    const char* first = s.data();
    const char* last = first + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& flag, const std::string& text, Parse parse) {
    std::vector<T> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::size_t end = (comma == std::string::npos) ? text.size() : comma;
        T v;
        if (end == pos || !parse(std::string_view(text.data() + pos, end - pos), v))
            usage_error(flag + ": cannot parse list entry in '" + text + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

struct CliArgs {
    std::string command;
    std::string config_path;
    std::string out;
    std::optional<long long> seed;
    std::optional<double> eps;
    std::vector<long long> K_list;
    std::vector<double> eta;
};

CliArgs parse_args(int argc, char** argv) {
    if (argc < 2) usage_error("missing command");
    CliArgs args;
    args.command = argv[1];
    if (args.command != "analyze" && args.command != "construct" && args.command != "verify" &&
        args.command != "sweep" && args.command != "nogo")
        usage_error("unknown command: " + args.command);
    for (int i = 2; i < argc; ++i) {
        std::string flag = argv[i];
        auto next = [&]() -> std::string {
            if (++i >= argc) usage_error(flag + " needs a value");
            return argv[i];
        };
        if (flag == "--config") {
            args.config_path = next();
        } else if (flag == "--out") {
            args.out = next();
        } else if (flag == "--seed") {
            long long v;
            if (!parse_ll(next(), v) || v < 0) usage_error("--seed needs a nonnegative integer");
            args.seed = v;
        } else if (flag == "--eps") {
            double v;
            if (!wframe::detail::parse_field_double(next(), v) || !(v > 0.0))
                usage_error("--eps needs a positive real");
            args.eps = v;
        } else if (flag == "--K") {
            for (long long v : parse_list<long long>("--K", next(), parse_ll))
                args.K_list.push_back(v);
        } else if (flag == "--eta") {
            for (double v : parse_list<double>("--eta", next(), wframe::detail::parse_field_double))
                args.eta.push_back(v);
        } else {
            usage_error("unknown flag: " + flag);
        }
    }
    if (args.eps && !args.K_list.empty()) usage_error("--eps and --K are mutually exclusive");
    return args;
}

struct RunConfig {
    std::string generator;
    double a = 2.0;
    double b = 1.0;
    std::optional<double> A;
    std::optional<wframe::DecayEnvelope> envelope;
    std::optional<double> target_eps;
    std::optional<long long> K;
    std::vector<long long> sweep_K;
    std::vector<double> eta;
    std::uint64_t seed = 1;
    long long signals = 10;
    double omega_max = 1.0;
    double step = 1.0 / 1024.0;
    double tol = 1e-6;
    std::string out = ".";
};

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw Error("config: top level must be a JSON object");
    static const char* known[] = {"generator", "a",       "b",         "A",    "envelope",
                                  "target_eps", "K",      "sweep_K",   "eta",  "seed",
                                  "signals",    "omega_max", "step",   "tol",  "out"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw Error("config: unknown key '" + item.key() + "'");
    }
    auto num = [&](const char* key) -> double {
        if (!j.at(key).is_number()) throw Error(std::string("config: ") + key + " must be a number");
        return j.at(key).get<double>();
    };
    auto integer = [&](const char* key) -> long long {
        if (!j.at(key).is_number_integer())
            throw Error(std::string("config: ") + key + " must be an integer");
        return j.at(key).get<long long>();
    };
    RunConfig cfg;
    if (j.contains("generator")) {
        if (!j.at("generator").is_string()) throw Error("config: generator must be a string");
        cfg.generator = j.at("generator").get<std::string>();
    }
    if (j.contains("a")) cfg.a = num("a");
    if (j.contains("b")) cfg.b = num("b");
    if (j.contains("A")) {
        cfg.A = num("A");
        if (!(*cfg.A > 0.0)) throw Error("config: A must be positive");
    }
    if (j.contains("envelope")) {
        const json& e = j.at("envelope");
        if (!e.is_object() || !e.contains("C") || !e.contains("sigma") || !e.at("C").is_number() ||
            !e.at("sigma").is_number())
            throw Error("config: envelope needs numeric C and sigma");
        cfg.envelope = wframe::DecayEnvelope(e.at("C").get<double>(), e.at("sigma").get<double>());
    }
    if (j.contains("target_eps")) {
        cfg.target_eps = num("target_eps");
        if (!(*cfg.target_eps > 0.0)) throw Error("config: target_eps must be positive");
    }
    if (j.contains("K")) cfg.K = integer("K");
    if (j.contains("sweep_K")) {
        if (!j.at("sweep_K").is_array()) throw Error("config: sweep_K must be an array of integers");
        for (const auto& v : j.at("sweep_K")) {
            if (!v.is_number_integer()) throw Error("config: sweep_K must be an array of integers");
            cfg.sweep_K.push_back(v.get<long long>());
        }
    }
    if (j.contains("eta")) {
        if (!j.at("eta").is_array()) throw Error("config: eta must be an array of numbers");
        for (const auto& v : j.at("eta")) {
            if (!v.is_number()) throw Error("config: eta must be an array of numbers");
            cfg.eta.push_back(v.get<double>());
        }
    }
    if (j.contains("seed")) {
        long long s = integer("seed");
        if (s < 0) throw Error("config: seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("signals")) {
        cfg.signals = integer("signals");
        if (cfg.signals < 1 || cfg.signals > 10000) throw Error("config: signals must be in [1, 10000]");
    }
    if (j.contains("omega_max")) {
        cfg.omega_max = num("omega_max");
        if (!(cfg.omega_max > 0.0)) throw Error("config: omega_max must be positive");
    }
    if (j.contains("step")) {
        cfg.step = num("step");
        if (!(cfg.step > 0.0)) throw Error("config: step must be positive");
    }
    if (j.contains("tol")) {
        cfg.tol = num("tol");
        if (!(cfg.tol > 0.0)) throw Error("config: tol must be positive");
    }
    if (j.contains("out")) {
        if (!j.at("out").is_string()) throw Error("config: out must be a string");
        cfg.out = j.at("out").get<std::string>();
        if (cfg.out.empty()) throw Error("config: out must not be empty");
    }
    return cfg;
}

RunConfig load_config(const CliArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = config_from_json(wframe::read_json_file(args.config_path));
    if (!args.out.empty()) cfg.out = args.out;
    if (args.seed) cfg.seed = static_cast<std::uint64_t>(*args.seed);
    if (args.eps) {
        cfg.target_eps = *args.eps;
        cfg.K.reset();
    }
    if (!args.K_list.empty()) {
        cfg.sweep_K = args.K_list;
        cfg.target_eps.reset();
        if (args.K_list.size() == 1)
            cfg.K = args.K_list.front();
        else
            cfg.K.reset();
    }
    if (!args.eta.empty()) cfg.eta = args.eta;
    return cfg;
}

wframe::GeneratorInfo load_generator(const RunConfig& cfg) {
    if (cfg.generator.empty()) throw Error("config: generator is required for this command");
    return wframe::make_generator(cfg.generator);
}

double resolve_A(const RunConfig& cfg, const wframe::GeneratorInfo& info) {
    if (cfg.A) return *cfg.A;
    if (info.default_lower_bound) return *info.default_lower_bound;
    throw Error("generator " + cfg.generator + " has no default lower frame bound; set A in the config");
}

wframe::DecayEnvelope resolve_envelope(const RunConfig& cfg, const wframe::GeneratorInfo& info) {
    if (cfg.envelope) return *cfg.envelope;
    if (!info.default_sigma)
        throw Error("generator " + cfg.generator +
                    " has no default decay rate; set envelope {C, sigma} in the config");
    wframe::EnvelopeFit fit = wframe::fit_decay_envelope(info.spectrum, *info.default_sigma, 1e4);
    if (fit.degenerate || !fit.certified)
        throw wframe::EnvelopeUnsound("no certified decay envelope for " + cfg.generator +
                                      "; set one in the config");
    return fit.env;
}

// Frame-condition gate shared by construct and sweep. Runs before A or the
// envelope is resolved, so an infeasible generator fails on the frame
// condition rather than on missing metadata.
wframe::FeasibilityReport feasibility_gate(const wframe::GeneratorInfo& info,
                                           const wframe::FrameParams& params, long long K,
                                           long long N) {
    // 16384 points per sign puts the probe spacing near 8e-5: below the
    // 1/(8K^2) gap width of dyadic-block counterexamples up to K = 38.
    wframe::FeasibilityReport feas =
        wframe::check_feasibility(info.spectrum, params, static_cast<double>(K),
                                  wframe::AnnulusGrid(params.a, 16384),
                                  1e-9 * params.b / static_cast<double>(N));
    if (!feas.pass)
        throw wframe::FrameConditionViolated(
            "truncated Calderon sum vanishes near gamma=" + wframe::fmt_double(feas.argmin_gamma) +
            " (min " + wframe::fmt_double(feas.min_value) + ")");
    return feas;
}

// Plan assembly for an explicit K. Unlike plan_for_K this tolerates
// epsilon_K >= sqrt(2bA): the closed-form error bound is then recorded as
// missing (NaN) while the dual itself stays perfectly usable, e.g. the
// Shannon K=1 system whose dual is exact.
wframe::ApproxDualPlan assemble_plan(const wframe::GeneratorInfo& info,
                                     const wframe::FrameParams& params, double A,
                                     const wframe::DecayEnvelope& env, long long K, long long N,
                                     const wframe::FeasibilityReport& feas) {
    wframe::ApproxDualPlan plan;
    plan.K = K;
    plan.N = N;
    plan.A = A;
    plan.params = params;
    plan.envelope = env;
    plan.generator = info.spectrum.name();
    plan.R_K = wframe::compute_RK(env, params, K);
    plan.epsilon_K = wframe::compute_epsilonK(env, params, K);
    try {
        plan.error_bound = wframe::error_bound(plan.epsilon_K, A, params.b);
    } catch (const wframe::BoundInapplicable&) {
        plan.error_bound = std::numeric_limits<double>::quiet_NaN();
    }
    plan.oversampled_lower_bound = A * static_cast<double>(N);
    double dip = std::sqrt(plan.R_K / (2.0 * params.b * A * static_cast<double>(K)));
    plan.perturbed_lower_bound = plan.oversampled_lower_bound * (1.0 - dip) * (1.0 - dip);
    plan.feasibility = feas;
    return plan;
}

int cmd_analyze(const RunConfig& cfg) {
    wframe::GeneratorInfo info = load_generator(cfg);
    wframe::FrameParams params(cfg.a, cfg.b);
    wframe::AnnulusGrid grid(params.a, 256);

    json rep;
    rep["generator"] = info.spectrum.name();
    rep["a"] = params.a;
    rep["b"] = params.b;
    try {
        rep["bessel_estimate"] = wframe::bessel_bound_estimate(info.spectrum, params, grid, estimate_tol);
    } catch (const wframe::NoTailControl&) {
        throw;  // uncontrollable tails are the command's failure, not a field's
    } catch (const wframe::TruncationBudgetExceeded& e) {
        rep["bessel_estimate"] = nullptr;
        rep["bessel_note"] = e.what();
    }
    try {
        rep["lower_estimate"] = wframe::lower_bound_estimate(info.spectrum, params, grid, estimate_tol);
    } catch (const wframe::NoTailControl&) {
        throw;
    } catch (const wframe::TruncationBudgetExceeded& e) {
        rep["lower_estimate"] = nullptr;
        rep["lower_note"] = e.what();
    }
    try {
        wframe::DecayEnvelope env = resolve_envelope(cfg, info);
        rep["envelope"] = {{"C", env.C}, {"sigma", env.sigma}};
    } catch (const Error& e) {
        rep["envelope"] = nullptr;
        rep["envelope_note"] = e.what();
    }
    double K_feas = cfg.K ? static_cast<double>(*cfg.K) : 8.0;
    wframe::FeasibilityReport feas = wframe::check_feasibility(
        info.spectrum, params, K_feas, wframe::AnnulusGrid(params.a, 16384));
    rep["feasibility"] = {{"K", K_feas},
                          {"pass", feas.pass},
                          {"min_value", feas.min_value},
                          {"argmin_gamma", feas.argmin_gamma}};

    fs::create_directories(cfg.out);
    wframe::write_json_file(cfg.out + "/analyze.json", rep);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_construct(const RunConfig& cfg) {
    if (cfg.target_eps.has_value() == cfg.K.has_value())
        throw Error("construct needs exactly one of target_eps or K");
    wframe::GeneratorInfo info = load_generator(cfg);
    wframe::FrameParams params(cfg.a, cfg.b);

    wframe::ApproxDualPlan plan;
    if (cfg.K) {
        if (*cfg.K < 1) throw Error("K must be at least 1");
        long long N = wframe::select_oversampling(params.b, static_cast<double>(*cfg.K));
        wframe::FeasibilityReport feas = feasibility_gate(info, params, *cfg.K, N);
        double A = resolve_A(cfg, info);
        wframe::DecayEnvelope env = resolve_envelope(cfg, info);
        plan = assemble_plan(info, params, A, env, *cfg.K, N, feas);
    } else {
        double A = resolve_A(cfg, info);
        wframe::DecayEnvelope env = resolve_envelope(cfg, info);
        plan = wframe::plan_for_target(info.spectrum, params, A, env, *cfg.target_eps,
                                       1LL << 32, true);
    }

    wframe::DualResult dual =
        wframe::dual_spectrum(wframe::truncate_spectrum(info.spectrum, static_cast<double>(plan.K)),
                              params, plan.N);
    fs::create_directories(cfg.out);
    wframe::write_json_file(cfg.out + "/plan.json", wframe::plan_to_json(plan));
    wframe::write_spectrum_csv(cfg.out + "/dual.csv", dual.spectrum,
                               static_cast<double>(plan.K), cfg.step);
    std::cout << "plan: generator=" << plan.generator << " K=" << plan.K << " N=" << plan.N
              << " epsilon_K=" << wframe::fmt_double(plan.epsilon_K) << " error_bound="
              << (std::isnan(plan.error_bound) ? std::string("n/a")
                                               : wframe::fmt_double(plan.error_bound))
              << "\n";
    std::cout << "wrote " << cfg.out << "/plan.json and " << cfg.out << "/dual.csv\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    wframe::ApproxDualPlan plan = wframe::plan_from_json(wframe::read_json_file(cfg.out + "/plan.json"));
    wframe::SpectrumCsv dual = wframe::read_spectrum_csv(cfg.out + "/dual.csv", plan.generator + "-dual");
    if (dual.gamma_max < static_cast<double>(plan.K) - 1e-9)
        throw Error("dual.csv grid does not cover [-K, K] from plan.json");
    wframe::GeneratorInfo info = wframe::make_generator(plan.generator);

    std::vector<wframe::BandlimitedSignal> signals = wframe::random_bandlimited(
        cfg.seed, cfg.omega_max, cfg.step, static_cast<std::size_t>(cfg.signals));
    std::vector<wframe::VerifyRow> rows;
    rows.reserve(signals.size());
    bool all_pass = true;
    for (std::size_t s = 0; s < signals.size(); ++s) {
        wframe::ReconstructionReport rep =
            wframe::reconstruction_error(signals[s], dual.spectrum, info.spectrum, plan.params,
                                         plan.N, cfg.tol, plan.error_bound);
        bool pass = rep.bound_checked ? rep.bound_satisfied
                                      : (rep.relative_error + rep.tail_budget <= exact_pass_tol);
        rows.push_back({static_cast<long long>(s), plan.K, plan.N, rep.relative_error,
                        rep.tail_budget, plan.error_bound, pass});
        all_pass = all_pass && pass;
    }
    wframe::write_text_file(cfg.out + "/verify.csv", wframe::verify_csv(rows));
    std::cout << "wrote " << cfg.out << "/verify.csv (" << rows.size() << " rows, "
              << (all_pass ? "all pass" : "bound violations") << ")\n";
    return all_pass ? 0 : 6;
}

int cmd_sweep(const RunConfig& cfg) {
    std::vector<long long> Ks = cfg.sweep_K;
    if (Ks.empty() && cfg.K) Ks.push_back(*cfg.K);
    if (Ks.empty()) throw Error("sweep needs a K list (config sweep_K or --K)");
    if (Ks.front() < 1) throw Error("sweep K values must be >= 1");
    for (std::size_t i = 1; i < Ks.size(); ++i)
        if (Ks[i] <= Ks[i - 1]) throw Error("sweep K list must be strictly ascending");

    wframe::GeneratorInfo info = load_generator(cfg);
    wframe::FrameParams params(cfg.a, cfg.b);

    std::vector<long long> Ns;
    std::vector<wframe::FeasibilityReport> feas;
    for (long long K : Ks) {
        long long N = wframe::select_oversampling(params.b, static_cast<double>(K));
        Ns.push_back(N);
        feas.push_back(feasibility_gate(info, params, K, N));
    }
    double A = resolve_A(cfg, info);
    wframe::DecayEnvelope env = resolve_envelope(cfg, info);
    std::vector<wframe::BandlimitedSignal> signals = wframe::random_bandlimited(
        cfg.seed, cfg.omega_max, cfg.step, static_cast<std::size_t>(cfg.signals));

    std::vector<wframe::SweepRow> rows;
    rows.reserve(Ks.size());
    bool all_pass = true;
    for (std::size_t i = 0; i < Ks.size(); ++i) {
        wframe::ApproxDualPlan plan = assemble_plan(info, params, A, env, Ks[i], Ns[i], feas[i]);
        wframe::DualResult dual = wframe::dual_spectrum(
            wframe::truncate_spectrum(info.spectrum, static_cast<double>(plan.K)), params, plan.N);
        wframe::SweepRow row;
        row.K = plan.K;
        row.N = plan.N;
        row.epsilon_K = plan.epsilon_K;
        row.bound = plan.error_bound;
        for (const wframe::BandlimitedSignal& f : signals) {
            wframe::ReconstructionReport rep = wframe::reconstruction_error(
                f, dual.spectrum, info.spectrum, params, plan.N, cfg.tol, plan.error_bound);
            row.measured = std::max(row.measured, rep.relative_error);
            row.tail_budget = std::max(row.tail_budget, rep.tail_budget);
            if (rep.bound_checked && !rep.bound_satisfied) all_pass = false;
        }
        rows.push_back(row);
    }
    fs::create_directories(cfg.out);
    wframe::write_text_file(cfg.out + "/sweep.csv", wframe::sweep_csv(rows));
    std::cout << "wrote " << cfg.out << "/sweep.csv (" << rows.size() << " rows, "
              << (all_pass ? "all bounds hold" : "bound violations") << ")\n";
    return all_pass ? 0 : 6;
}

int cmd_nogo(const RunConfig& cfg) {
    if (cfg.eta.empty()) throw Error("nogo needs at least one eta (config eta or --eta)");
    std::vector<wframe::NogoRow> rows;
    rows.reserve(cfg.eta.size());
    for (double eta : cfg.eta) rows.push_back(wframe::nogo_row(eta));
    json out = wframe::nogo_to_json(rows);
    fs::create_directories(cfg.out);
    wframe::write_json_file(cfg.out + "/nogo.json", out);
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        CliArgs args = parse_args(argc, argv);
        RunConfig cfg = load_config(args);
        if (args.command == "analyze") return cmd_analyze(cfg);
        if (args.command == "construct") return cmd_construct(cfg);
        if (args.command == "verify") return cmd_verify(cfg);
        if (args.command == "sweep") return cmd_sweep(cfg);
        return cmd_nogo(cfg);
    } catch (const wframe::NoTailControl& e) {
        std::cerr << "wframe: " << e.what() << "\n";
        return 3;
    } catch (const wframe::FrameConditionViolated& e) {
        std::cerr << "wframe: " << e.what() << "\n";
        return 4;
    } catch (const wframe::TargetUnreachable& e) {
        std::cerr << "wframe: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "wframe: " << e.what() << "\n";
        return 2;
    }
}
