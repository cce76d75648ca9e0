#include "sisstab/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sisstab/errors.hpp"
#include "sisstab/model_io.hpp"

namespace sisstab::cli {

using nlohmann::json;

namespace {

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(std::string("bad ") + what + " '" + text + "'");
        }
    }
    if (out.empty()) throw Error(std::string("empty ") + what);
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(std::string("bad ") + what + " '" + text + "'");
        }
    }
    if (out.empty()) throw Error(std::string("empty ") + what);
    return out;
}

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

json point_json(const std::vector<std::complex<double>>& z) {
    json arr = json::array();
    for (const auto& c : z) arr.push_back({{"re", c.real()}, {"im", c.imag()}, {"angle", std::arg(c)}});
    return arr;
}

std::string point_text(const std::vector<std::complex<double>>& z) {
    std::string s = "(";
    for (std::size_t i = 0; i < z.size(); ++i) s += (i ? ", " : "") + fmt(std::arg(z[i]), "%.6g");
    return s + ") rad";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << content;
}

std::string describe_directions(const SisModel& m) {
    std::string s;
    for (int i = 0; i < m.L(); ++i) {
        const auto& d = m.directions[static_cast<std::size_t>(i)];
        if (i) s += ", ";
        s += to_string(d.kind);
        if (d.kind != DirectionKind::Infinite) s += " N=" + std::to_string(d.period);
        s += " (" + std::to_string(d.n_pos) + "+" + std::to_string(d.n_neg) + ")";
    }
    return s;
}

std::string method_of(const SisModel& m) {
    if (m.all_infinite()) return "global SOS on the torus";
    if (m.all_periodic()) return "Routh table + roots-of-unity grid";
    return "Routh table + SOS on the periodic grid";
}

struct Analysis {
    Verdict verdict;
    DegreeTuple slack;
};

Analysis run_analysis(const SisModel& m, const RunConfig& cfg) {
    AnalyzeOptions opts = cfg.analyze;
    opts.slack = cfg.slack.empty() ? DegreeTuple(static_cast<std::size_t>(m.L()), 0) : cfg.slack;
    Verdict v = analyze(m, opts);
    while (v.status == VerdictStatus::Indeterminate && cfg.auto_slack_max >= 0 && v.certificate) {
        bool raised = false;
        for (int& e : opts.slack)
            if (e < cfg.auto_slack_max) {
                ++e;
                raised = true;
            }
        if (!raised) break;
        v = analyze(m, opts);
    }
    return {std::move(v), opts.slack};
}

json verdict_json(const SisModel& m, const Analysis& a) {
    const Verdict& v = a.verdict;
    json j;
    j["verdict"] = to_string(v.status);
    j["condition"] = v.condition;
    j["reason"] = v.reason;
    j["method"] = method_of(m);
    j["slack"] = a.slack;
    j["model_hash"] = model_hash(m);
    j["epsilon_star"] = v.epsilon_star ? json(*v.epsilon_star) : json(nullptr);
    j["witness"] = v.witness.empty() ? json(nullptr) : point_json(v.witness);
    j["witness_row"] = v.witness_row ? json(*v.witness_row) : json(nullptr);
    if (v.certificate) {
        j["certificate"] = {{"residual", v.certificate->residual},
                            {"min_eig", v.certificate->min_eig},
                            {"valid", v.certificate->valid},
                            {"blocks", v.certificate->blocks.size()}};
    }
    json polys = json::array();
    for (const auto& p : v.polys) polys.push_back(pretty(p));
    j["polynomials"] = polys;
    return j;
}

void print_verdict_text(std::ostream& out, const SisModel& m, const Analysis& a) {
    const Verdict& v = a.verdict;
    out << "model: " << model_hash(m) << "\n";
    out << "directions: " << describe_directions(m) << "\n";
    out << "method: " << method_of(m) << "\n";
    out << "slack: " << join(a.slack) << "\n";
    out << "verdict: " << to_string(v.status) << "\n";
    out << "decided by: " << v.condition << "\n";
    if (v.epsilon_star) out << "epsilon*: " << fmt(*v.epsilon_star) << "\n";
    if (v.certificate)
        out << "certificate: residual " << fmt(v.certificate->residual, "%.3e") << ", min eigenvalue "
            << fmt(v.certificate->min_eig, "%.3e") << ", " << (v.certificate->valid ? "valid" : "INVALID") << "\n";
    if (!v.witness.empty()) out << "witness: z at angles " << point_text(v.witness) << "\n";
    if (v.witness_row) out << "witness row: " << *v.witness_row << "\n";
    out << "reason: " << v.reason << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void RunConfig::validate() const {
    if (model_path.empty()) throw Error("a model file is required");
    for (int e : slack)
        if (e < 0) throw Error("slack entries must be nonnegative");
    for (int g : grid)
        if (g < 1) throw Error("grid counts must be positive");
    if (command == Command::Verify && certificate_path.empty()) throw Error("verify needs --certificate");
    if (command == Command::Simulate) {
        if (sites.empty()) throw Error("simulate needs --sites");
        if (!(sim.dt > 0)) throw Error("--dt must be positive");
        if (!(sim.t_end >= sim.dt)) throw Error("--t-end must be at least --dt");
    }
}

int exit_code(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Stable: return kExitStable;
        case VerdictStatus::NotStable: return kExitNotStable;
        case VerdictStatus::Indeterminate: return kExitIndeterminate;
    }
    return kExitError;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const SisModel m = parse_model_file(cfg.model_path);
    const Analysis a = run_analysis(m, cfg);
    std::ostringstream report;
    if (cfg.format == Format::Json) report << verdict_json(m, a).dump(2) << "\n";
    else print_verdict_text(report, m, a);
    if (cfg.output_path.empty()) out << report.str();
    else write_file(cfg.output_path, report.str());
    err << "time: " << fmt(seconds_since(t0), "%.3f") << " s\n";
    return exit_code(a.verdict.status);
}

int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    cfg.validate();
    const SisModel m = parse_model_file(cfg.model_path);
    const Analysis a = run_analysis(m, cfg);
    if (!a.verdict.certificate) {
        err << "no SOS certificate for this model: " << to_string(a.verdict.status) << " (" << a.verdict.condition
            << "): " << a.verdict.reason << "\n";
        return exit_code(a.verdict.status);
    }
    Certificate cert = *a.verdict.certificate;
    cert.model_hash = model_hash(m);
    const std::string text = certificate_to_json(cert) + "\n";
    if (cfg.output_path.empty()) {
        out << text;
    } else {
        write_file(cfg.output_path, text);
        if (cfg.format == Format::Json) out << verdict_json(m, a).dump(2) << "\n";
        else print_verdict_text(out, m, a);
    }
    return exit_code(a.verdict.status);
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    cfg.validate();
    const SisModel m = parse_model_file(cfg.model_path);
    std::ifstream f(cfg.certificate_path);
    if (!f) throw Error("cannot open certificate " + cfg.certificate_path);
    std::stringstream ss;
    ss << f.rdbuf();
    const Certificate cert = certificate_from_json(ss.str());
    const std::string hash = model_hash(m);
    if (!cert.model_hash.empty() && cert.model_hash != hash)
        throw Error("certificate was issued for model " + cert.model_hash + ", not " + hash);
    const SosTargets targets = sos_targets(m, cfg.analyze.size_limit);
    const VerificationReport rep = verify_certificate(cert, targets.polys, targets.domain, cfg.analyze.verify);

    std::string worst;
    for (std::size_t i = 0; i < rep.worst_degree.size(); ++i) worst += (i ? "," : "") + std::to_string(rep.worst_degree[i]);
    if (cfg.format == Format::Json) {
        json j{{"valid", rep.valid},         {"residual", rep.residual},     {"min_eig", rep.min_eig},
               {"epsilon", cert.epsilon},    {"lower_bound", rep.lower_bound}, {"message", rep.message},
               {"worst_poly", rep.worst_poly}, {"worst_degree", rep.worst_degree}, {"model_hash", hash}};
        out << j.dump(2) << "\n";
    } else {
        out << "valid: " << (rep.valid ? "yes" : "no") << "\n";
        out << "epsilon: " << fmt(cert.epsilon) << "\n";
        out << "residual: " << fmt(rep.residual, "%.3e");
        if (rep.worst_poly >= 0) out << " (polynomial " << rep.worst_poly + 1 << ", degree " << worst << ")";
        out << "\n";
        out << "min eigenvalue: " << fmt(rep.min_eig, "%.3e") << "\n";
        out << "guaranteed lower bound: " << fmt(rep.lower_bound) << "\n";
        out << "message: " << rep.message << "\n";
    }
    return rep.valid ? kExitStable : kExitNotStable;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const SisModel m = parse_model_file(cfg.model_path);
    const std::vector<int> counts = sample_counts(m, cfg.grid);
    const SampleResult r = freq_sample_abscissa(m, cfg.grid);
    if (cfg.format == Format::Json) {
        json j{{"max_abscissa", r.max_abscissa}, {"argmax", point_json(r.argmax)}, {"points", r.points}, {"grid", counts}};
        out << j.dump(2) << "\n";
    } else {
        out << "grid: " << join(counts) << " (" << r.points << " points)\n";
        out << "max abscissa: " << fmt(r.max_abscissa, "%.9f") << "\n";
        out << "argmax: z at angles " << point_text(r.argmax) << "\n";
    }
    err << "time: " << fmt(seconds_since(t0), "%.3f") << " s\n";
    return r.max_abscissa < 0 ? kExitStable : kExitNotStable;
}

std::vector<InitEntry> parse_init(const std::string& spec, int n0) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw Error("--init expects k1,k2,...:state:value, got '" + spec + "'");
    std::vector<int> site = parse_int_list(spec.substr(0, c1), "site");
    for (int& k : site) {
        if (k < 1) throw Error("site indices are 1-based");
        --k;
    }
    const std::string state = spec.substr(c1 + 1, c2 - c1 - 1);
    double value = 0;
    try {
        std::size_t used = 0;
        const std::string vtext = spec.substr(c2 + 1);
        value = std::stod(vtext, &used);
        if (used != vtext.size()) throw std::invalid_argument(vtext);
    } catch (const std::exception&) {
        throw Error("bad value in --init '" + spec + "'");
    }
    std::vector<InitEntry> out;
    if (state == "*") {
        for (int s = 0; s < n0; ++s) out.push_back({site, s, value});
    } else {
        const int s = parse_int_list(state, "state").front();
        if (s < 1 || s > n0) throw Error("state index out of range in --init '" + spec + "'");
        out.push_back({site, s - 1, value});
    }
    return out;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    cfg.validate();
    const SisModel m = parse_model_file(cfg.model_path);
    const LiftedSystem ls = lift_finite_system(m, cfg.sites);
    std::vector<InitEntry> entries;
    for (const auto& item : cfg.init)
        for (auto& e : parse_init(item, m.n0)) entries.push_back(std::move(e));
    const Eigen::VectorXd x0 = initial_state(ls, entries);
    const Trajectory tr = simulate(ls, x0, cfg.sim);
    const std::string csv = trajectory_csv(ls, tr);

    std::ostream& summary = cfg.output_path.empty() ? err : out;
    if (cfg.output_path.empty()) out << csv;
    else write_file(cfg.output_path, csv);

    double beta = 0;
    bool have_beta = true;
    try {
        beta = fit_decay_rate(tr);
    } catch (const Error&) {
        have_beta = false;
    }
    if (cfg.format == Format::Json) {
        json j{{"times", tr.times}, {"norms", tr.norms}, {"sites", cfg.sites}};
        j["decay_rate"] = have_beta ? json(beta) : json(nullptr);
        summary << j.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            summary << "t = " << fmt(tr.times[i], "%g") << " s: |x| = " << fmt(tr.norms[i], "%.6e") << "\n";
        if (have_beta) summary << "fitted decay rate: " << fmt(beta, "%.6f") << " 1/s\n";
    }
    return kExitStable;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stability certificates for spatially interconnected systems", "sisstab"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string slack, grid, sites, times, format = "text", solver = "ipm";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("model", cfg.model_path, "model file (TOML)")->required();
        sub->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("-o,--output", cfg.output_path, "write the main output to this file");
    };
    auto add_analysis = [&](CLI::App* sub) {
        sub->add_option("--slack", slack, "Gram degree slack per direction, e.g. 0,0");
        sub->add_option("--auto-slack", cfg.auto_slack_max, "raise the slack up to this value while indeterminate");
        sub->add_option("--prescreen-grid", cfg.analyze.prescreen_grid, "samples per circle checked before the SDP (0 = off)");
        sub->add_option("--witness-grid", cfg.analyze.witness_grid, "samples per circle searched for an unstable point");
        sub->add_option("--eps-abs", cfg.analyze.solver.eps_abs, "solver absolute tolerance");
        sub->add_option("--eps-rel", cfg.analyze.solver.eps_rel, "solver relative tolerance");
        sub->add_option("--max-iter", cfg.analyze.solver.max_iter, "solver iteration limit");
        sub->add_option("--seed", cfg.analyze.solver.seed, "solver start seed (0 = default start)");
        sub->add_option("--solver", solver, "SDP method: ipm or admm")->check(CLI::IsMember({"ipm", "admm"}));
    };
    auto add_verify = [&](CLI::App* sub) {
        sub->add_option("--rtol", cfg.analyze.verify.rtol, "relative coefficient tolerance");
        sub->add_option("--ptol", cfg.analyze.verify.ptol, "eigenvalue tolerance");
    };

    auto* analyze_cmd = app.add_subcommand("analyze", "decide exponential stability");
    add_common(analyze_cmd);
    add_analysis(analyze_cmd);
    add_verify(analyze_cmd);

    auto* certify_cmd = app.add_subcommand("certify", "write an SOS certificate as JSON");
    add_common(certify_cmd);
    add_analysis(certify_cmd);
    add_verify(certify_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "check a certificate against a model");
    add_common(verify_cmd);
    add_verify(verify_cmd);
    verify_cmd->add_option("-c,--certificate", cfg.certificate_path, "certificate JSON")->required();

    auto* sample_cmd = app.add_subcommand("sample", "largest spectral abscissa of A(z) on a grid");
    add_common(sample_cmd);
    sample_cmd->add_option("--grid", grid, "samples per direction, e.g. 64,64 (periodic directions use their roots of unity)");

    auto* simulate_cmd = app.add_subcommand("simulate", "integrate a finite ring realization");
    add_common(simulate_cmd);
    simulate_cmd->add_option("--sites", sites, "ring size per direction, e.g. 24,24")->required();
    simulate_cmd->add_option("--init", cfg.init, "initial value k1,k2:state:value (1-based, state may be *)");
    simulate_cmd->add_option("--t-end", cfg.sim.t_end, "final time in seconds");
    simulate_cmd->add_option("--dt", cfg.sim.dt, "RK4 step in seconds");
    simulate_cmd->add_option("--times", times, "recorded times, e.g. 0,3,5,20");

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitStable : kExitError;
    }

    try {
        cfg.format = format == "json" ? Format::Json : Format::Text;
        cfg.analyze.solver.method = sdp::sdp_method_from_string(solver);
        if (!slack.empty()) cfg.slack = parse_int_list(slack, "slack");
        if (!grid.empty()) cfg.grid = parse_int_list(grid, "grid");
        if (!sites.empty()) cfg.sites = parse_int_list(sites, "sites");
        if (!times.empty()) cfg.sim.sample_times = parse_double_list(times, "times");
        if (*analyze_cmd) {
            cfg.command = Command::Analyze;
            return cmd_analyze(cfg, out, err);
        }
        if (*certify_cmd) {
            cfg.command = Command::Certify;
            return cmd_certify(cfg, out, err);
        }
        if (*verify_cmd) {
            cfg.command = Command::Verify;
            return cmd_verify(cfg, out, err);
        }
        if (*sample_cmd) {
            cfg.command = Command::Sample;
            return cmd_sample(cfg, out, err);
        }
        cfg.command = Command::Simulate;
        return cmd_simulate(cfg, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace sisstab::cli
