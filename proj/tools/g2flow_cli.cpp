#include "g2flow/diagnostics.hpp"
#include "g2flow/refcheck.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace g2flow;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitVerifyFail = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

FlowKind parse_flow(const std::string& s) {
    if (s == "rhf") return FlowKind::RHF;
    if (s == "rl1") return FlowKind::RL1;
    if (s == "rl2") return FlowKind::RL2;
    if (s == "ngf") return FlowKind::NGF;
    throw ConfigError("unknown flow: " + s);
}

struct ExperimentConfig {
    FlowKind flow = FlowKind::RHF;
    FamilyKind family = FamilyKind::CCY;
    double a = 1.0;                         // ccy initial condition (f,h) = (a,1)
    std::vector<double> h7_params{1, 1, 1, 1}; // heisenberg (f0,a0,b0,c0)
    double t0 = 0.0;
    double t1 = 1e6;
    bool t1_set = false;
    double rtol = 1e-10;
    double atol = 1e-12;
    double K = 0.0;
    std::string output_dir = "out";
    std::vector<std::vector<double>> grid; // sweep only

    std::vector<double> initial_state() const {
        if (family == FamilyKind::CCY) return {a, 1.0};
        return h7_params;
    }
    void validate() const {
        for (double v : initial_state())
            if (!(v > 0) || !std::isfinite(v)) throw ConfigError("ansatz parameters must be positive");
        if (!(rtol > 0) || !(atol > 0)) throw ConfigError("tolerances must be positive");
        if (!std::isfinite(t0) || !std::isfinite(t1)) throw ConfigError("t_span must be finite");
        if (K < 0) throw ConfigError("K must be nonnegative");
        if (family == FamilyKind::HEISENBERG && K != 0)
            throw ConfigError("K models the transversal curvature bound of the contact family; "
                              "the Heisenberg family is flat transversally (use K = 0)");
    }
};

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (j.contains("flow")) cfg.flow = parse_flow(j["flow"].get<std::string>());
    if (j.contains("family")) {
        const auto& fam = j["family"];
        std::string kind = fam.value("kind", "ccy");
        if (kind == "ccy") {
            cfg.family = FamilyKind::CCY;
            cfg.a = fam.value("a", 1.0);
        } else if (kind == "heisenberg") {
            cfg.family = FamilyKind::HEISENBERG;
            cfg.h7_params = {fam.value("f0", 1.0), fam.value("a0", 1.0), fam.value("b0", 1.0),
                             fam.value("c0", 1.0)};
        } else {
            throw ConfigError("unknown family kind: " + kind);
        }
    }
    if (j.contains("t_span")) {
        auto ts = j["t_span"];
        if (!ts.is_array() || ts.size() != 2) throw ConfigError("t_span must be [t0, t1]");
        cfg.t0 = ts[0].get<double>();
        cfg.t1 = ts[1].get<double>();
        cfg.t1_set = true;
    }
    cfg.rtol = j.value("rtol", cfg.rtol);
    cfg.atol = j.value("atol", cfg.atol);
    cfg.K = j.value("K", cfg.K);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("grid")) {
        for (const auto& row : j["grid"]) cfg.grid.push_back(row.get<std::vector<double>>());
    }
    return cfg;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    out << content;
    if (!out) throw IoError("write failed for " + p.string());
}

std::string trajectory_csv(const Trajectory& tr, const std::vector<std::string>& labels) {
    std::ostringstream os;
    os << "t";
    for (auto& l : labels) os << "," << l;
    os << ",volfactor,normT2,trT,lambda,eh_density\n";
    for (size_t i = 0; i < tr.times.size(); ++i) {
        os << fmt_double(tr.times[i]);
        for (double v : tr.states[i]) os << "," << fmt_double(v);
        const Diagnostics& d = tr.diags[i];
        os << "," << fmt_double(d.volfactor) << "," << fmt_double(d.normT2) << ","
           << fmt_double(d.trT) << "," << fmt_double(d.lambda) << "," << fmt_double(d.eh_density)
           << "\n";
    }
    return os.str();
}

json run_experiment(const ExperimentConfig& cfg, const fs::path& outdir) {
    cfg.validate();
    OdeSystem sys = reduce_to_ode(cfg.flow, cfg.family);
    FamilyDiagnostics diag = FamilyDiagnostics::build(cfg.family, cfg.K);

    double t1 = cfg.t1;
    IntegrateSettings set;
    set.rtol = cfg.rtol;
    set.atol = cfg.atol;
    Rhs rhs = [&sys](const std::vector<double>& y) { return sys.eval(y); };
    Trajectory tr = integrate(rhs, cfg.initial_state(), cfg.t0, t1, set, diag);

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory " + outdir.string());
    write_file(outdir / "trajectory.csv", trajectory_csv(tr, sys.labels));

    json summary;
    summary["flow"] = flow_name(cfg.flow);
    summary["family"] = family_name(cfg.family);
    summary["labels"] = sys.labels;
    summary["initial_state"] = cfg.initial_state();
    summary["t0"] = cfg.t0;
    summary["t1"] = t1;
    summary["rtol"] = cfg.rtol;
    summary["atol"] = cfg.atol;
    summary["K"] = cfg.K;
    summary["termination"] = termination_name(tr.status);
    summary["t_end"] = tr.t_est;
    summary["samples"] = tr.times.size();

    bool backward = t1 < cfg.t0;
    bool finite_singularity = tr.status != Termination::ReachedEnd;
    if (finite_singularity)
        summary["tau_est"] = tr.t_est;
    else
        summary["tau_est"] = nullptr;

    // closed-form comparison when one exists: contact family from (a, 1)
    bool has_closed = cfg.family == FamilyKind::CCY;
    double closed_tau = kInf;
    if (has_closed) {
        ClosedSolution sol = closed_solution(cfg.flow, cfg.a);
        closed_tau = sol.singular_time();
        double maxrel = 0;
        for (size_t i = 0; i < tr.times.size(); ++i) {
            double t = tr.times[i];
            if (!sol.inside(t)) continue;
            auto [f, h] = sol.eval(t);
            maxrel = std::max(maxrel, std::abs(tr.states[i][0] - f) / f);
            maxrel = std::max(maxrel, std::abs(tr.states[i][1] - h) / h);
        }
        json cf;
        cf["max_rel_error"] = maxrel;
        cf["singular_time"] = std::isfinite(closed_tau) ? json(closed_tau) : json(nullptr);
        summary["closed_form"] = cf;
    } else {
        summary["closed_form"] = nullptr;
    }

    // singularity classification from the trajectory's Λ samples; near a
    // finite singular time the accepted mesh is resampled log-uniformly
    // through the dense output
    json sing = nullptr;
    try {
        std::vector<std::pair<double, double>> samples;
        double tau;
        if (finite_singularity) {
            tau = (has_closed && std::isfinite(closed_tau)) ? closed_tau : tr.t_est;
            double s_end = std::max(std::abs(tau - tr.t_est) * 1.5,
                                    std::abs(tau - tr.t_est) + std::abs(tr.t_est) * 1e-12);
            double s_far = std::abs(tau - cfg.t0) / 4;
            if (s_end <= 0 || s_far <= s_end) {
                s_end = std::abs(tau - cfg.t0) * 1e-6;
                s_far = std::abs(tau - cfg.t0) / 4;
            }
            const int per_decade = 24;
            int n = static_cast<int>(std::ceil(per_decade * std::log10(s_far / s_end))) + 1;
            for (int i = 0; i < n; ++i) {
                double s = s_end * std::pow(10.0, static_cast<double>(i) / per_decade);
                if (s > s_far) break;
                double t = backward ? tau + s : tau - s;
                if ((t - cfg.t0) * (tr.t_est - t) < 0) continue; // outside the covered range
                double lam = diag(tr.at(t)).lambda;
                samples.emplace_back(backward ? -t : t, lam);
            }
            tau = backward ? -tau : tau;
        } else {
            tau = kInf;
            for (size_t i = 0; i < tr.times.size(); ++i)
                samples.emplace_back(backward ? -tr.times[i] : tr.times[i], tr.diags[i].lambda);
        }
        SingularityReport rep = classify(samples, tau);
        summary["singularity_type"] = sing_type_name(rep.type);
        sing = json{{"type", sing_type_name(rep.type)},
                    {"tau", std::isfinite(rep.tau) ? json(backward ? -rep.tau : rep.tau) : json(nullptr)},
                    {"exponent", rep.exponent},
                    {"sup_estimate", rep.sup_estimate}};
    } catch (const std::exception& e) {
        summary["singularity_type"] = nullptr;
        sing = json{{"error", e.what()}};
    }
    summary["singularity"] = sing;

    // uniform-continuity report over the integrated interval
    if (has_closed) {
        double lo = std::min(cfg.t0, tr.t_est), hi = std::max(cfg.t0, tr.t_est);
        ContinuityReport rep = continuity_report(cfg.flow, cfg.a, lo, hi);
        summary["continuity"] = json{{"sup_dgdt", std::isfinite(rep.sup_dgdt) ? json(rep.sup_dgdt) : json(nullptr)},
                                     {"uniformly_continuous", rep.uniformly_continuous},
                                     {"note", rep.note}};
    } else {
        double sup = 0;
        for (size_t i = 0; i < tr.times.size(); ++i) {
            for (size_t p = 0; p < tr.states[i].size(); ++p)
                sup = std::max(sup, std::abs(2 * tr.states[i][p] * tr.derivs[i][p]));
        }
        summary["continuity"] =
            json{{"sup_dgdt", sup}, {"uniformly_continuous", true}, {"note", "sampled over the integrated range"}};
    }
    return summary;
}

int cmd_run(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (!c.t1_set) c.t1 = 1e6; // forward default; blow-up detection stops finite-time flows
    fs::path outdir = c.output_dir;
    json summary = run_experiment(c, outdir);
    write_file(outdir / "summary.json", summary.dump(2) + "\n");
    std::cout << "wrote " << (outdir / "trajectory.csv").string() << " and "
              << (outdir / "summary.json").string() << "\n";
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    if (cfg.grid.empty()) throw ConfigError("sweep requires a nonempty grid");
    ExperimentConfig base = cfg;
    json items = json::array();
    for (size_t i = 0; i < cfg.grid.size(); ++i) {
        ExperimentConfig c = base;
        if (c.family == FamilyKind::CCY) {
            if (cfg.grid[i].size() != 2) throw ConfigError("ccy grid rows are [f0, h0]");
            if (cfg.grid[i][1] != 1.0) throw ConfigError("ccy initial condition must be (a, 1)");
            c.a = cfg.grid[i][0];
        } else {
            if (cfg.grid[i].size() != 4) throw ConfigError("heisenberg grid rows are [f0, a0, b0, c0]");
            c.h7_params = cfg.grid[i];
        }
        char sub[32];
        std::snprintf(sub, sizeof(sub), "item_%03zu", i);
        fs::path outdir = fs::path(cfg.output_dir) / sub;
        json entry;
        entry["y0"] = cfg.grid[i];
        try {
            json summary = run_experiment(c, outdir);
            write_file(outdir / "summary.json", summary.dump(2) + "\n");
            entry["ok"] = true;
            entry["termination"] = summary["termination"];
            entry["singularity_type"] = summary["singularity_type"];
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            entry["ok"] = false;
            entry["error"] = e.what();
        }
        items.push_back(entry);
    }
    fs::path outdir = cfg.output_dir;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory " + outdir.string());
    write_file(outdir / "sweep.json", items.dump(2) + "\n");
    std::cout << "wrote " << (outdir / "sweep.json").string() << " (" << items.size() << " items)\n";
    return 0;
}

int cmd_reduce(const ExperimentConfig& cfg) {
    OdeSystem sys = reduce_to_ode(cfg.flow, cfg.family);
    json out;
    for (size_t i = 0; i < sys.labels.size(); ++i)
        out["d(" + sys.labels[i] + ")"] = sys.rhs_raw[i].str(sys.labels);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_verify() {
    auto results = refcheck::run_reference_checks();
    std::cout << refcheck::render_table(results);
    return refcheck::any_fail(results) ? kExitVerifyFail : 0;
}

int cmd_report(const std::string& out_path) {
    auto results = refcheck::run_reference_checks();
    auto constants = refcheck::computed_constants();
    write_file(out_path, refcheck::render_report(results, constants));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"G2-structure flow engine: verification, ODE reduction, integration, reports"};
    app.require_subcommand(1);

    std::string config_path, family_str, flow_str, out_override;
    double a_flag = -1, t0_flag = 0, t1_flag = 0, rtol_flag = -1, K_flag = -1;
    double f0 = -1, a0 = -1, b0 = -1, c0p = -1;
    bool t0_used = false, t1_used = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--flow", flow_str, "rhf|rl1|rl2|ngf");
        cmd->add_option("--family", family_str, "ccy|heisenberg");
        cmd->add_option("--a", a_flag, "contact-family parameter a (initial (f,h) = (a,1))");
        cmd->add_option("--f0", f0, "heisenberg initial f");
        cmd->add_option("--a0", a0, "heisenberg initial a");
        cmd->add_option("--b0", b0, "heisenberg initial b");
        cmd->add_option("--c0", c0p, "heisenberg initial c");
        cmd->add_option("--t0", t0_flag, "start time")->each([&](const std::string&) { t0_used = true; });
        cmd->add_option("--t1", t1_flag, "end time (may be < t0 for backward runs)")
            ->each([&](const std::string&) { t1_used = true; });
        cmd->add_option("--rtol", rtol_flag, "relative tolerance");
        cmd->add_option("--K", K_flag, "transversal curvature bound");
        cmd->add_option("--out", out_override, "output directory");
    };

    CLI::App* run = app.add_subcommand("run", "integrate a flow and write trajectory.csv + summary.json");
    add_common(run);
    CLI::App* swp = app.add_subcommand("sweep", "independent runs over a grid of initial states");
    add_common(swp);
    CLI::App* red = app.add_subcommand("reduce", "print the reduced ODE system as JSON");
    add_common(red);
    CLI::App* ver = app.add_subcommand("verify", "check engine-derived formulas against the references");
    std::string report_out = "report.md";
    CLI::App* rep = app.add_subcommand("report", "write the discrepancy ledger");
    rep->add_option("--out", report_out, "output markdown file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (!flow_str.empty()) cfg.flow = parse_flow(flow_str);
        if (!family_str.empty()) {
            if (family_str == "ccy") cfg.family = FamilyKind::CCY;
            else if (family_str == "heisenberg") cfg.family = FamilyKind::HEISENBERG;
            else throw ConfigError("unknown family: " + family_str);
        }
        if (a_flag > 0) cfg.a = a_flag;
        if (f0 > 0) cfg.h7_params[0] = f0;
        if (a0 > 0) cfg.h7_params[1] = a0;
        if (b0 > 0) cfg.h7_params[2] = b0;
        if (c0p > 0) cfg.h7_params[3] = c0p;
        if (t0_used) cfg.t0 = t0_flag;
        if (t1_used) {
            cfg.t1 = t1_flag;
            cfg.t1_set = true;
        }
        if (rtol_flag > 0) cfg.rtol = rtol_flag;
        if (K_flag >= 0) cfg.K = K_flag;
        if (!out_override.empty()) cfg.output_dir = out_override;

        if (ver->parsed()) return cmd_verify();
        if (rep->parsed()) return cmd_report(report_out);
        if (red->parsed()) return cmd_reduce(cfg);
        if (run->parsed()) return cmd_run(cfg);
        if (swp->parsed()) return cmd_sweep(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
