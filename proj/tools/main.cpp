// Command-line front end: graph generation, exact solves, exact sampling,
// CLT/LLN experiments, limit variance tables, and an MCMC cross-check.
//
// Exit codes: 0 success, 1 usage error, 2 experiment gate failed, 3 runtime
// error. Every run echoes its resolved configuration: as a "config" object in
// JSON output, as a leading "# {...}" comment line in CSV output.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <isingcm/experiments.hpp>
#include <isingcm/graphgen.hpp>
#include <isingcm/ising1d.hpp>
#include <isingcm/limits.hpp>
#include <isingcm/mcmc.hpp>
#include <isingcm/observables.hpp>
#include <isingcm/report_json.hpp>
#include <isingcm/rng.hpp>

namespace {

using nlohmann::json;

struct CliOptions {
    std::string model = "cm2";
    double p = 0.5;
    std::uint32_t N = 1000;
    double beta = 0.0;
    double B = 0.0;
    std::uint32_t R = 1;
    std::uint32_t M = 1;
    std::uint64_t T = 0;
    std::uint64_t seed = 0;
    double level = 0.01;
    unsigned threads = 0;
    std::string mode = "rq";
    double eps = 0.1;
    std::vector<std::uint32_t> grid;
    std::string graph_path;
    std::string out;
    std::string format = "json";
    std::string trace_path;
    std::uint64_t sweeps = 6000;
    std::uint64_t burn_in = 1000;
};

isingcm::Model parse_model(const std::string& name) {
    if (name == "cm2") return isingcm::Model::cm2;
    if (name == "cm12") return isingcm::Model::cm12;
    throw std::invalid_argument("unknown model: " + name);
}

// Output goes to --out when given, else stdout; open failures are runtime
// errors, distinct from usage errors.
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        os = &file;
    }
    std::ostream& stream() { return *os; }
};

void emit_json(Sink& sink, const json& j) { sink.stream() << j.dump(2) << '\n'; }

std::string config_comment(const json& cfg) { return "# " + cfg.dump(); }

std::ostream& csv_numbers(std::ostream& os) {
    os.precision(17);
    return os;
}

isingcm::MultiGraph build_graph(const CliOptions& o) {
    isingcm::Rng rng = isingcm::Rng::stream(o.seed, 0);
    if (parse_model(o.model) == isingcm::Model::cm2) return isingcm::cm2(o.N, rng);
    if (!(o.p >= 0.0 && o.p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
    return isingcm::cm12(o.N, o.p, rng);
}

json model_config(const CliOptions& o) {
    json cfg{{"model", o.model}, {"N", o.N}, {"seed", o.seed}};
    if (o.model == "cm12") cfg["p"] = o.p;
    return cfg;
}

int run_generate(const CliOptions& o) {
    if (o.out.empty()) throw std::invalid_argument("generate requires --out");
    const isingcm::MultiGraph g = build_graph(o);
    {
        std::ofstream gf(o.out);
        if (!gf) throw std::runtime_error("cannot open output file: " + o.out);
        isingcm::save_graph(g, gf, o.seed);
        if (!gf) throw std::runtime_error("failed writing output file: " + o.out);
    }
    const auto decomp = isingcm::decompose(g);
    json cfg = model_config(o);
    cfg["command"] = "generate";
    cfg["out"] = o.out;
    json j{{"schema_version", isingcm::kReportSchemaVersion},
           {"command", "generate"},
           {"config", cfg},
           {"results",
            {{"N", g.N},
             {"edges", g.edges.size()},
             {"lines", decomp.line_lengths.size()},
             {"tori", decomp.torus_lengths.size()}}}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

struct ResolvedGraph {
    isingcm::MultiGraph graph;
    json config;
};

// Either loads --graph (file seed echoed) or regenerates from the model
// flags; the generated graph equals what `generate` wrote for the same flags.
ResolvedGraph resolve_graph(const CliOptions& o, const char* command) {
    ResolvedGraph out;
    if (!o.graph_path.empty()) {
        std::ifstream gf(o.graph_path);
        if (!gf) throw std::runtime_error("cannot open graph file: " + o.graph_path);
        auto loaded = isingcm::load_graph(gf);
        out.graph = std::move(loaded.graph);
        out.config = json{{"graph", o.graph_path},
                          {"graph_seed", loaded.seed},
                          {"N", out.graph.N}};
    } else {
        out.graph = build_graph(o);
        out.config = model_config(o);
    }
    out.config["command"] = command;
    out.config["beta"] = o.beta;
    out.config["B"] = o.B;
    return out;
}

int run_exact(const CliOptions& o) {
    ResolvedGraph rg = resolve_graph(o, "exact");
    const isingcm::IsingParams params{o.beta, o.B};
    const auto decomp = isingcm::decompose(rg.graph);
    const auto q = isingcm::quenched_observables(params, decomp);
    Sink sink(o.out);
    if (o.format == "csv") {
        auto& os = csv_numbers(sink.stream());
        os << config_comment(rg.config) << '\n'
           << "N,beta,B,logZ,pressure,meanS,varS,chiN\n"
           << q.N << ',' << o.beta << ',' << o.B << ',' << q.log_Z << ',' << q.pressure << ','
           << q.mean_S << ',' << q.var_S << ',' << q.chi_N << '\n';
        return 0;
    }
    json j{{"schema_version", isingcm::kReportSchemaVersion},
           {"command", "exact"},
           {"config", rg.config},
           {"results",
            {{"N", q.N},
             {"logZ", q.log_Z},
             {"pressure", q.pressure},
             {"meanS", q.mean_S},
             {"varS", q.var_S},
             {"chiN", q.chi_N},
             {"lines", decomp.line_lengths.size()},
             {"tori", decomp.torus_lengths.size()}}}};
    emit_json(sink, j);
    return 0;
}

int run_sample(const CliOptions& o) {
    ResolvedGraph rg = resolve_graph(o, "sample");
    rg.config["M"] = o.M;
    const isingcm::IsingParams params{o.beta, o.B};
    const auto decomp = isingcm::decompose(rg.graph);
    isingcm::Rng rng = isingcm::Rng::stream(o.seed, 1);
    std::vector<std::int64_t> draws(o.M);
    isingcm::RunningMoments rm;
    for (auto& s : draws) {
        s = isingcm::sample_configuration(params, decomp, rng).S;
        rm.add(static_cast<double>(s));
    }
    Sink sink(o.out);
    if (o.format == "csv") {
        auto& os = csv_numbers(sink.stream());
        os << config_comment(rg.config) << '\n' << "draw,S\n";
        for (std::size_t i = 0; i < draws.size(); ++i) os << i << ',' << draws[i] << '\n';
        return 0;
    }
    json j{{"schema_version", isingcm::kReportSchemaVersion},
           {"command", "sample"},
           {"config", rg.config},
           {"results",
            {{"draws", draws},
             {"mean_S", rm.mean},
             {"var_S", rm.variance()}}}};
    emit_json(sink, j);
    return 0;
}

isingcm::ExperimentConfig experiment_config(const CliOptions& o) {
    isingcm::ExperimentConfig cfg;
    cfg.model = parse_model(o.model);
    cfg.p = o.p;
    cfg.N = o.N;
    cfg.params = {o.beta, o.B};
    cfg.replicas = o.R;
    cfg.samples = o.M;
    cfg.seed = o.seed;
    cfg.truncation = o.T;
    cfg.level = o.level;
    return cfg;
}

int emit_report(const CliOptions& o, const char* command, const isingcm::ExperimentReport& rep) {
    Sink sink(o.out);
    if (o.format == "csv") {
        json cfg = isingcm::to_json(rep.config);
        cfg["command"] = command;
        cfg["kind"] = rep.kind;
        auto& os = csv_numbers(sink.stream());
        os << config_comment(cfg) << '\n';
        if (rep.kind == "lln") {
            os << "N,probability,upper_bound,max_graph_probability\n";
            for (std::size_t k = 0; k < rep.lln_N.size(); ++k) {
                os << rep.lln_N[k] << ',' << rep.lln_probability[k] << ','
                   << (rep.lln_upper_bound[k] ? 1 : 0) << ','
                   << rep.lln_max_graph_probability[k] << '\n';
            }
        } else {
            os << isingcm::report_csv_header() << '\n' << isingcm::report_csv_row(rep) << '\n';
        }
    } else {
        json j = isingcm::to_json(rep);
        j["command"] = command;
        emit_json(sink, j);
    }
    return rep.pass ? 0 : 2;
}

int run_clt(const CliOptions& o) {
    const isingcm::ExperimentConfig cfg = experiment_config(o);
    isingcm::ExperimentReport rep;
    if (o.mode == "rq") {
        rep = isingcm::rq_clt_experiment(cfg, o.threads);
    } else if (o.mode == "aq") {
        rep = isingcm::aq_clt_experiment(cfg, o.threads);
    } else if (o.mode == "xn") {
        rep = isingcm::graph_fluctuation_experiment(cfg, o.threads);
    } else {
        throw std::invalid_argument("unknown clt mode: " + o.mode);
    }
    return emit_report(o, "clt", rep);
}

int run_lln(const CliOptions& o) {
    const isingcm::ExperimentConfig cfg = experiment_config(o);
    const auto rep = isingcm::lln_experiment(cfg, o.eps, o.grid, o.threads);
    return emit_report(o, "lln", rep);
}

int run_variance_table(const CliOptions& o) {
    const isingcm::IsingParams params{o.beta, o.B};
    const std::uint64_t T =
        o.T >= 2 ? o.T : isingcm::default_truncation(params, o.p);
    const isingcm::Cm12Limits lim = isingcm::cm12_limits(params, o.p, T);
    json cfg{{"command", "variance-table"}, {"p", o.p},      {"beta", o.beta},
             {"B", o.B},                    {"T", lim.T}};
    Sink sink(o.out);
    if (o.format == "csv") {
        auto& os = csv_numbers(sink.stream());
        os << config_comment(cfg) << '\n'
           << "beta,B,p,T,chi,sigma_G2,sigma_aq2,tail_bound\n"
           << o.beta << ',' << o.B << ',' << o.p << ',' << lim.T << ',' << lim.chi << ','
           << lim.sigma_G2 << ',' << lim.sigma_aq2 << ',' << lim.tail_bound << '\n';
        return 0;
    }
    json j{{"schema_version", isingcm::kReportSchemaVersion},
           {"command", "variance-table"},
           {"config", cfg},
           {"results",
            {{"pressure", lim.pressure},
             {"magnetization", lim.magnetization},
             {"chi", lim.chi},
             {"sigma_G2", lim.sigma_G2},
             {"sigma_aq2", lim.sigma_aq2},
             {"T", lim.T},
             {"tail_bound", lim.tail_bound}}}};
    emit_json(sink, j);
    return 0;
}

int run_mcmc_check(const CliOptions& o) {
    const isingcm::MultiGraph g = build_graph(o);
    const isingcm::IsingParams params{o.beta, o.B};
    isingcm::Rng rng = isingcm::Rng::stream(o.seed, 1);
    const isingcm::McmcMoments est = isingcm::estimate_moments(g, params, o.sweeps, o.burn_in, rng);
    const auto q = isingcm::quenched_observables(params, isingcm::decompose(g));

    if (!o.trace_path.empty()) {
        // Same stream from scratch reproduces the trace the estimate used.
        isingcm::Rng trace_rng = isingcm::Rng::stream(o.seed, 1);
        const auto trace = isingcm::glauber_trace(g, params, o.sweeps, o.burn_in, trace_rng);
        std::ofstream tf(o.trace_path);
        if (!tf) throw std::runtime_error("cannot open output file: " + o.trace_path);
        tf << "sweep,S\n";
        for (std::size_t t = 0; t < trace.size(); ++t)
            tf << o.burn_in + t << ',' << trace[t] << '\n';
    }

    const double z_mean = est.se_mean > 0.0 ? (est.mean_S - q.mean_S) / est.se_mean : 0.0;
    const double z_var = est.se_var > 0.0 ? (est.var_S - q.var_S) / est.se_var : 0.0;
    const bool pass = std::fabs(z_mean) <= 4.0 && std::fabs(z_var) <= 4.0;
    json cfg = model_config(o);
    cfg["command"] = "mcmc-check";
    cfg["beta"] = o.beta;
    cfg["B"] = o.B;
    cfg["sweeps"] = o.sweeps;
    cfg["burn_in"] = o.burn_in;
    json j{{"schema_version", isingcm::kReportSchemaVersion},
           {"command", "mcmc-check"},
           {"config", cfg},
           {"results",
            {{"mcmc_mean_S", est.mean_S},
             {"mcmc_var_S", est.var_S},
             {"se_mean", est.se_mean},
             {"se_var", est.se_var},
             {"samples", est.samples},
             {"batches", est.batches},
             {"exact_mean_S", q.mean_S},
             {"exact_var_S", q.var_S},
             {"z_mean", z_mean},
             {"z_var", z_var},
             {"pass", pass}}}};
    Sink sink(o.out);
    emit_json(sink, j);
    return pass ? 0 : 2;
}

void add_model_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--model", o.model, "graph model")
        ->check(CLI::IsMember({"cm2", "cm12"}));
    cmd->add_option("--p", o.p, "degree-2 fraction for cm12");
    cmd->add_option("--N", o.N, "vertex count");
    cmd->add_option("--seed", o.seed, "master seed; fully determines output");
}

void add_param_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--beta", o.beta, "coupling strength, >= 0");
    cmd->add_option("--B", o.B, "external field");
}

void add_output_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

} // namespace

int main(int argc, char** argv) {
    CliOptions o;
    int rc = 0;

    CLI::App app{"Exact Ising solves, sampling, and limit-theorem experiments on "
                 "configuration-model graphs"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "generate a graph and write it to a file");
    add_model_flags(gen, o);
    gen->add_option("--out", o.out, "graph file path")->required();
    gen->callback([&] { rc = run_generate(o); });

    auto* exact = app.add_subcommand("exact", "exact partition function and spin moments");
    add_model_flags(exact, o);
    add_param_flags(exact, o);
    add_output_flags(exact, o);
    exact->add_option("--graph", o.graph_path, "read the graph from a file instead of generating");
    exact->callback([&] { rc = run_exact(o); });

    auto* sample = app.add_subcommand("sample", "draw exact spin configurations");
    add_model_flags(sample, o);
    add_param_flags(sample, o);
    add_output_flags(sample, o);
    sample->add_option("--graph", o.graph_path, "read the graph from a file instead of generating");
    sample->add_option("--M", o.M, "number of draws");
    sample->callback([&] { rc = run_sample(o); });

    auto* clt = app.add_subcommand("clt", "standardized-sum and graph-fluctuation CLT experiments");
    add_model_flags(clt, o);
    add_param_flags(clt, o);
    add_output_flags(clt, o);
    clt->add_option("--mode", o.mode, "rq | aq | xn")
        ->check(CLI::IsMember({"rq", "aq", "xn"}));
    clt->add_option("--R", o.R, "graph replicas");
    clt->add_option("--M", o.M, "spin draws per graph");
    clt->add_option("--T", o.T, "line-length series truncation (0 = automatic)");
    clt->add_option("--level", o.level, "KS significance threshold");
    clt->add_option("--threads", o.threads, "worker count (0 = ISINGCM_THREADS or hardware)");
    clt->callback([&] { rc = run_clt(o); });

    auto* lln = app.add_subcommand("lln", "deviation-probability decay across sizes");
    add_model_flags(lln, o);
    add_param_flags(lln, o);
    add_output_flags(lln, o);
    lln->add_option("--R", o.R, "graph replicas per size");
    lln->add_option("--M", o.M, "spin draws per graph");
    lln->add_option("--eps", o.eps, "deviation threshold");
    lln->add_option("--grid", o.grid, "comma-separated increasing sizes")
        ->required()
        ->delimiter(',');
    lln->add_option("--T", o.T, "line-length series truncation (0 = automatic)");
    lln->add_option("--threads", o.threads, "worker count (0 = ISINGCM_THREADS or hardware)");
    lln->callback([&] { rc = run_lln(o); });

    auto* vt = app.add_subcommand("variance-table", "limit pressures and CLT variances for cm12");
    vt->add_option("--p", o.p, "degree-2 fraction")->required();
    add_param_flags(vt, o);
    vt->add_option("--T", o.T, "line-length series truncation (0 = automatic)");
    add_output_flags(vt, o);
    vt->callback([&] { rc = run_variance_table(o); });

    auto* mc = app.add_subcommand("mcmc-check", "heat-bath estimates against exact moments");
    add_model_flags(mc, o);
    add_param_flags(mc, o);
    mc->add_option("--sweeps", o.sweeps, "total sweeps");
    mc->add_option("--burn-in", o.burn_in, "discarded sweeps");
    mc->add_option("--trace", o.trace_path, "write the post-burn-in trace as CSV");
    mc->add_option("--out", o.out, "output path (default stdout)");
    mc->callback([&] { rc = run_mcmc_check(o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
    return rc;
}
