// laxkit command-line front end: grading, verify, cm, involution.
#include "laxkit/calogero.hpp"
#include "laxkit/liealg.hpp"
#include "laxkit/suites.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

using json = nlohmann::json;
using namespace laxkit;

namespace {

constexpr int schema_version = 1;

enum Exit { ok = 0, suite_failure = 1, usage = 2, runtime_abort = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json complex_json(cplx v) { return json::array({v.real(), v.imag()}); }

// Values from --config fill options that were not given on the command line.
class ConfigFile {
public:
    void load(const std::string& path) {
        if (path.empty()) return;
        std::ifstream in(path);
        if (!in) throw UsageError("cannot read config file " + path);
        try {
            data_ = json::parse(in);
        } catch (const json::parse_error& e) {
            throw UsageError(std::string("config file: ") + e.what());
        }
        if (!data_.is_object()) throw UsageError("config file must hold a JSON object");
    }
    template <class T>
    void fill(const CLI::Option* opt, const char* key, T& target) const {
        if (opt->count() > 0 || !data_.contains(key)) return;
        try {
            target = data_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw UsageError(std::string("config key ") + key + ": " + e.what());
        }
    }

private:
    json data_ = json::object();
};

std::uint64_t resolve_seed(const CLI::Option* opt, const ConfigFile& cfg, std::uint64_t& seed) {
    if (opt->count() == 0) {
        if (const char* env = std::getenv("LAXKIT_SEED")) {
            try {
                seed = std::stoull(env);
            } catch (const std::exception&) {
                throw UsageError(std::string("LAXKIT_SEED is not an integer: ") + env);
            }
        }
        cfg.fill(opt, "seed", seed);  // the config file wins over the environment
    }
    return seed;
}

Family family_arg(const std::string& name) {
    try {
        return parse_family(name);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

// For family A, --rank n selects gl(n) (roots A_{n-1}); otherwise the rank of B_n, C_n, D_n or G2.
int simple_root_count(Family f, int rank) {
    if (f == Family::G2 && rank != 2) throw UsageError("G2 has rank 2");
    if (rank < 2) throw UsageError("rank must be at least 2");
    return f == Family::A ? rank - 1 : rank;
}

int cmd_grading(const std::string& fam, int rank, int root, bool dual, bool as_json) {
    const Family f = family_arg(fam);
    const int roots = simple_root_count(f, rank);
    if (root < 1 || root > roots) throw UsageError("root index must lie in 1.." + std::to_string(roots));
    const auto dec = catalog_grading(f, rank, root, dual);
    json dims = json::object();
    std::vector<std::size_t> list;
    for (int p = dec->min_degree(); p <= dec->max_degree(); ++p) {
        dims[std::to_string(p)] = dec->dim(p);
        list.push_back(dec->dim(p));
    }
    const long mist = check_mist_identity(*dec);
    if (as_json) {
        json out{{"schema_version", schema_version},
                 {"algebra", dec->algebra().name()},
                 {"family", family_name(f)},
                 {"rank", rank},
                 {"root", root},
                 {"dual", dual},
                 {"dim", dec->algebra().dim()},
                 {"depth", dec->depth()},
                 {"dims", dims},
                 {"mist_residual", mist}};
        std::cout << out.dump(2) << "\n";
        return ok;
    }
    std::cout << dec->algebra().name() << " graded by alpha_" << root << (dual ? " (dual)" : "") << "\n";
    std::cout << "depth k = " << dec->depth() << "\n";
    std::cout << "dims (";
    for (std::size_t i = 0; i < list.size(); ++i) std::cout << (i ? "," : "") << list[i];
    std::cout << ") for degrees " << dec->min_degree() << ".." << dec->max_degree() << "\n";
    std::cout << "mist residual " << mist << "\n";
    return ok;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) throw UsageError("unknown suite: " + suite);
    const SuiteReport r = run_suite(suite, seed);
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"count", c.count},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"detail", c.detail}});
    json out{{"schema_version", schema_version}, {"suite", r.suite},   {"seed", r.seed},
             {"passed", r.passed()},            {"seconds", r.seconds}, {"checks", checks}};
    out["counterexample"] = r.passed() ? json(nullptr) : json(r.counterexample());
    std::cout << out.dump(2) << "\n";
    return r.passed() ? ok : suite_failure;
}

CMSystem cli_system(Family f, int n, cplx tau, cplx g = cplx(0, 1)) {
    if (f == Family::G2) throw UsageError("Calogero-Moser systems exist for A, B, C, D");
    if (n < 1) throw UsageError("n must be positive");
    if (tau.imag() <= 0) throw UsageError("tau needs a positive imaginary part");
    CMSystem sys = suite_system(f, n);
    sys.lattice = Lattice(sys.lattice.omega1(), sys.lattice.omega1() * tau);
    sys.couplings = Couplings::standard(f, n, g);
    return sys;
}

CMState sample_clear_state(const CMSystem& sys, std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 20; ++attempt) {
        CMState s = sample_state(sys, rng);
        try {
            check_state(sys, s);
            return s;
        } catch (const CollisionError&) {
        }
    }
    throw std::runtime_error("no collision-free state after 20 samples");
}

struct CmOptions {
    std::string family = "A";
    int n = 2;
    double T = 10;
    double dt = 1e-3;
    std::string scheme = "rk4";
    double tau_re = 0, tau_im = 1;
    cplx coupling{0, 1};
    std::string out;
    std::string report;
    int every = 100;
};

int cmd_cm(const CmOptions& o, std::uint64_t seed) {
    const Family f = family_arg(o.family);
    const CMSystem sys = cli_system(f, o.n, cplx(o.tau_re, o.tau_im), o.coupling);
    Scheme scheme;
    try {
        scheme = parse_scheme(o.scheme);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (!(o.T >= 0) || !(o.dt > 0)) throw UsageError("need T >= 0 and dt > 0");
    if (o.every < 1) throw UsageError("--every must be positive");
    if (o.out.empty()) throw UsageError("--out is required");

    std::mt19937_64 rng(seed);
    const CMState s0 = sample_clear_state(sys, rng);
    const auto zs = suite_spectral_points();
    const ConservationRun run = run_conservation(sys, s0, o.T, o.dt, scheme, zs, o.every);

    std::ofstream csv(o.out);
    if (!csv) throw UsageError("cannot write " + o.out);
    csv << std::setprecision(17);
    csv << "t";
    for (int i = 1; i <= sys.n; ++i) csv << ",q_" << i;
    for (int i = 1; i <= sys.n; ++i) csv << ",p_" << i;
    csv << ",H";
    for (std::size_t k = 1; k <= zs.size(); ++k)
        for (int p = 2; p <= 4; ++p) csv << ",inv_p" << p << "_z" << k << ",inv_p" << p << "_z" << k << "_im";
    csv << "\n";
    for (const auto& smp : run.samples) {
        csv << smp.t;
        for (int i = 0; i < sys.n; ++i) csv << "," << smp.state.q(i).real();
        for (int i = 0; i < sys.n; ++i) csv << "," << smp.state.p(i).real();
        csv << "," << smp.h.real();
        for (cplx v : smp.traces) csv << "," << v.real() << "," << v.imag();
        csv << "\n";
    }
    if (run.aborted) csv << "# truncated: " << run.reason << "\n";
    csv.flush();

    if (!o.report.empty()) {
        json spectral = json::array();
        for (cplx z : zs) spectral.push_back(complex_json(z));
        json rep{{"schema_version", schema_version},
                 {"family", family_name(f)},
                 {"n", sys.n},
                 {"seed", seed},
                 {"T", o.T},
                 {"dt", o.dt},
                 {"scheme", o.scheme},
                 {"tau", complex_json(sys.lattice.tau())},
                 {"half_periods", json::array({complex_json(sys.lattice.omega1()), complex_json(sys.lattice.omega2())})},
                 {"coupling", complex_json(o.coupling)},
                 {"samples", run.samples.size()},
                 {"H0", run.samples.empty() ? json(nullptr) : complex_json(run.samples.front().h)},
                 {"max_H_drift", run.max_h_drift},
                 {"max_spec_drift", run.max_spec_drift},
                 {"spectral_points", spectral},
                 {"aborted", run.aborted}};
        if (run.aborted) rep["abort_reason"] = run.reason;
        if (f == Family::B) {
            // H does not contain p_0, so q_0 stays at its initial value under every flow.
            rep["q0"] = {{"value", complex_json(sys.q0)}, {"velocity", 0.0}, {"frozen", true}};
        }
        std::ofstream out(o.report);
        if (!out) throw UsageError("cannot write " + o.report);
        out << rep.dump(2) << "\n";
    }
    if (run.aborted) {
        std::cerr << "integration stopped: " << run.reason << "\n";
        return runtime_abort;
    }
    return ok;
}

std::vector<int> parse_powers(const std::string& spec) {
    std::vector<int> out;
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw UsageError("bad --powers entry: " + s);
        }
    };
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const int lo = to_int(spec.substr(0, dots)), hi = to_int(spec.substr(dots + 2));
        for (int p = lo; p <= hi; ++p) out.push_back(p);
    } else {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_int(item));
    }
    if (out.empty()) throw UsageError("--powers is empty");
    return out;
}

int cmd_involution(const std::string& fam, int n, const std::string& powers_spec, std::uint64_t seed) {
    const Family f = family_arg(fam);
    const CMSystem sys = cli_system(f, n, cplx(0, 1));
    const std::vector<int> powers = parse_powers(powers_spec);
    for (int p : powers) {
        if (p < 1) throw UsageError("powers must be positive");
        if (f != Family::A && p % 2 != 0) throw UsageError("odd powers vanish identically for B, C and D");
    }
    std::mt19937_64 rng(seed);
    const CMState s = sample_clear_state(sys, rng);
    json table = json::array();
    double worst = 0;
    for (const auto& e : bracket_table(sys, s, powers)) {
        worst = std::max(worst, std::abs(e.value));
        table.push_back({{"p", e.p}, {"q", e.q}, {"bracket", complex_json(e.value)}, {"abs", std::abs(e.value)}});
    }
    json q = json::array(), p = json::array();
    for (int i = 0; i < sys.n; ++i) {
        q.push_back(s.q(i).real());
        p.push_back(s.p(i).real());
    }
    json out{{"schema_version", schema_version},
             {"family", family_name(f)},
             {"n", n},
             {"seed", seed},
             {"powers", powers},
             {"state", {{"q", q}, {"p", p}}},
             {"brackets", table},
             {"max_abs_bracket", worst}};
    std::cout << out.dump(2) << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lax operator algebras and elliptic Calogero-Moser systems"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with option values; flags override it");

    auto* grading = app.add_subcommand("grading", "grading of a simple Lie algebra by a simple root");
    std::string g_family;
    int g_rank = 0, g_root = 0;
    bool g_dual = false, g_json = false;
    grading->add_option("--family", g_family, "A, B, C, D or G2")->required();
    grading->add_option("--rank", g_rank, "n of gl(n), B_n, C_n, D_n; 2 for G2")->required();
    grading->add_option("--root", g_root, "1-based simple root index")->required();
    grading->add_flag("--dual", g_dual, "flip the sign of the grading");
    grading->add_flag("--json", g_json, "print JSON");

    auto* verify = app.add_subcommand("verify", "run a property suite");
    std::string v_suite;
    std::uint64_t v_seed = 7;
    auto* v_suite_opt = verify->add_option("--suite", v_suite, "suite name");
    auto* v_seed_opt = verify->add_option("--seed", v_seed, "random seed (fallback: LAXKIT_SEED)");

    auto* cm = app.add_subcommand("cm", "integrate an elliptic Calogero-Moser system");
    CmOptions cmo;
    std::uint64_t cm_seed = 7;
    auto* cm_family = cm->add_option("--family", cmo.family, "A, B, C or D");
    auto* cm_n = cm->add_option("--n", cmo.n, "number of particles");
    auto* cm_T = cm->add_option("--T", cmo.T, "final time");
    auto* cm_dt = cm->add_option("--dt", cmo.dt, "step size");
    auto* cm_scheme = cm->add_option("--scheme", cmo.scheme, "rk4 or leapfrog");
    std::vector<double> tau;
    auto* cm_tau = cm->add_option("--tau", tau, "modular parameter as re im (default 0 1)")->expected(2);
    std::vector<double> coupling;
    auto* cm_coupling =
        cm->add_option("--coupling", coupling, "coupling scale g as re im (default 0 1, repulsive)")->expected(2);
    auto* cm_out = cm->add_option("--out", cmo.out, "trajectory CSV");
    auto* cm_report = cm->add_option("--report", cmo.report, "conservation report JSON");
    auto* cm_every = cm->add_option("--every", cmo.every, "write every k-th step");
    auto* cm_seed_opt = cm->add_option("--seed", cm_seed, "seed of the initial state (fallback: LAXKIT_SEED)");

    auto* inv = app.add_subcommand("involution", "Poisson brackets of the residue Hamiltonians");
    std::string i_family = "A", i_powers = "2..4";
    int i_n = 3;
    std::uint64_t i_seed = 7;
    auto* i_family_opt = inv->add_option("--family", i_family, "A, B, C or D");
    auto* i_n_opt = inv->add_option("--n", i_n, "number of particles");
    auto* i_powers_opt = inv->add_option("--powers", i_powers, "list 2,3,4 or range 2..4");
    auto* i_seed_opt = inv->add_option("--seed", i_seed, "seed of the sampled state (fallback: LAXKIT_SEED)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        ConfigFile cfg;
        cfg.load(config_path);
        if (grading->parsed()) return cmd_grading(g_family, g_rank, g_root, g_dual, g_json);
        if (verify->parsed()) {
            cfg.fill(v_suite_opt, "suite", v_suite);
            if (v_suite.empty()) throw UsageError("--suite is required");
            return cmd_verify(v_suite, resolve_seed(v_seed_opt, cfg, v_seed));
        }
        if (cm->parsed()) {
            cfg.fill(cm_family, "family", cmo.family);
            cfg.fill(cm_n, "n", cmo.n);
            cfg.fill(cm_T, "T", cmo.T);
            cfg.fill(cm_dt, "dt", cmo.dt);
            cfg.fill(cm_scheme, "scheme", cmo.scheme);
            cfg.fill(cm_tau, "tau", tau);
            cfg.fill(cm_coupling, "coupling", coupling);
            cfg.fill(cm_out, "out", cmo.out);
            cfg.fill(cm_report, "report", cmo.report);
            cfg.fill(cm_every, "every", cmo.every);
            if (!tau.empty()) {
                if (tau.size() != 2) throw UsageError("--tau takes two numbers");
                cmo.tau_re = tau[0];
                cmo.tau_im = tau[1];
            }
            if (!coupling.empty()) {
                if (coupling.size() != 2) throw UsageError("--coupling takes two numbers");
                cmo.coupling = cplx(coupling[0], coupling[1]);
            }
            return cmd_cm(cmo, resolve_seed(cm_seed_opt, cfg, cm_seed));
        }
        if (inv->parsed()) {
            cfg.fill(i_family_opt, "family", i_family);
            cfg.fill(i_n_opt, "n", i_n);
            cfg.fill(i_powers_opt, "powers", i_powers);
            return cmd_involution(i_family, i_n, i_powers, resolve_seed(i_seed_opt, cfg, i_seed));
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return runtime_abort;
    }
    return usage;
}
