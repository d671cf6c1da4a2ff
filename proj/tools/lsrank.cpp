// lsrank: command-line front end for fitting and analysing ranked dynamic networks.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsrank/core.hpp"
#include "lsrank/init.hpp"
#include "lsrank/io.hpp"
#include "lsrank/regions.hpp"
#include "lsrank/report.hpp"
#include "lsrank/sampler.hpp"
#include "lsrank/simgen.hpp"
#include "lsrank/summaries.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lsrank;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct RunConfig {
    std::string input;
    std::string output_dir = ".";
    long iterations = 1000;
    long burn_in = 100;
    long thin = 1;
    unsigned long long seed = 1;
    int p = 2;
    double kappa = 10000.0;
    int chains = 1;
    std::optional<int> top_q;
    double level = 0.95;
    int k = 3;
    bool k_given = false;
    std::optional<int> time;  // 1-based, regions only
    bool exact_tau_path = false;
    int sim_n = 10;
    int sim_T = 5;
};

json to_json(const ModelParams& m) {
    return {{"r", m.r}, {"tau0", m.tau0}, {"tau1", m.tau1}, {"tau", m.tau}, {"theta", m.theta}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_int_matrix(const fs::path& path, const IntMatrix& m) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (const auto& row : m) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << '\n';
    }
}

Hyperparams hyper_from(const RunConfig& cfg) {
    Hyperparams h;
    h.iterations = cfg.iterations;
    h.burn_in = cfg.burn_in;
    h.thin = cfg.thin;
    h.seed = cfg.seed;
    h.kappa = cfg.kappa;
    h.validate();
    return h;
}

int cmd_fit(const RunConfig& cfg) {
    const RankPanel panel = load_panel(cfg.input);
    Hyperparams hyper = hyper_from(cfg);
    if (cfg.chains < 1) throw ConfigError("--chains must be at least 1");
    const InitResult init = initialize(panel, cfg.p);
    init.apply_to(hyper);
    for (const auto& w : init.warnings) std::cerr << "warning: " << w << '\n';

    const fs::path root(cfg.output_dir);
    fs::create_directories(root);
    std::vector<std::optional<ChainResult>> results(std::size_t(cfg.chains));
    std::vector<std::exception_ptr> errors(std::size_t(cfg.chains));
    auto run = [&](int c) {
        try {
            SamplerOptions opts;
            opts.chain = unsigned(c);
            opts.top_q = cfg.top_q;
            if (cfg.exact_tau_path) opts.tau_path = TauPathUpdate::Exact;
            results[std::size_t(c)] = run_chain(panel, hyper, init, opts);
        } catch (...) {
            errors[std::size_t(c)] = std::current_exception();
        }
    };
    if (cfg.chains == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int c = 0; c < cfg.chains; ++c) pool.emplace_back(run, c);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    const json init_info = {{"c0", init.c0},          {"tau0", init.tau0}, {"tau1", init.tau1},
                            {"tau", init.tau},        {"theta", init.theta}, {"lambda0", init.lambda0},
                            {"lambda1", init.lambda1}, {"mu", init.mu},   {"warnings", init.warnings}};
    for (int c = 0; c < cfg.chains; ++c) {
        const ChainResult& res = *results[std::size_t(c)];
        const fs::path dir = cfg.chains == 1 ? root : root / ("chain_" + std::to_string(c + 1));
        StoreWriter w(dir, panel.n(), panel.T(), cfg.p);
        for (const auto& s : res.samples) w.append(s);
        w.annotate("init", init_info.dump());
        w.annotate("acceptance", json{{"latent", res.acceptance.latent},
                                      {"theta", res.acceptance.theta},
                                      {"reach", res.acceptance.reach},
                                      {"tau_path", res.acceptance.tau_path}}
                                     .dump());
        w.annotate("config", json{{"iterations", hyper.iterations},
                                  {"burn_in", hyper.burn_in},
                                  {"thin", hyper.thin},
                                  {"seed", hyper.seed},
                                  {"chain", c},
                                  {"kappa", hyper.kappa},
                                  {"top_q", cfg.top_q ? json(*cfg.top_q) : json(nullptr)},
                                  {"tau_path", cfg.exact_tau_path ? "exact" : "factorized"}}
                                 .dump());
        w.close();
        save_panel(panel, dir / "panel.txt");
        std::ofstream tr(dir / "traces.csv");
        write_traces_csv(res.traces, tr);
        std::cout << dir.string() << ": " << res.samples.size() << " draws, acceptance latent "
                  << res.acceptance.latent << ", theta " << res.acceptance.theta << ", reach "
                  << res.acceptance.reach << '\n';
    }
    return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
    GenSpec spec;
    spec.n = cfg.sim_n;
    spec.T = cfg.sim_T;
    spec.p = cfg.p;
    spec.seed = cfg.seed;
    const GeneratedPanel g = generate_panel(spec);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    save_panel(g.panel, dir / "panel.txt");
    json truth = to_json(g.params);
    truth["n"] = spec.n;
    truth["T"] = spec.T;
    truth["p"] = spec.p;
    truth["seed"] = spec.seed;
    truth["X"] = g.X.values();
    write_json(dir / "truth.json", truth);
    std::cout << "wrote " << (dir / "panel.txt").string() << '\n';
    return kOk;
}

struct LoadedStore {
    SampleStore store;
    RankPanel panel;
};

LoadedStore open_store(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("--input must name a sample store directory");
    SampleStore store = read_store(cfg.input);
    if (store.samples.empty()) throw ConfigError("sample store at " + cfg.input + " holds no draws");
    RankPanel panel = load_panel(fs::path(cfg.input) / "panel.txt");
    if (panel.n() != store.n || panel.T() != store.T) throw ConfigError("stored panel does not match the draws");
    return {std::move(store), std::move(panel)};
}

fs::path output_for(const RunConfig& cfg, const fs::path& fallback) {
    return cfg.output_dir.empty() || cfg.output_dir == "." ? fallback : fs::path(cfg.output_dir);
}

int cmd_summarize(const RunConfig& cfg) {
    const auto [store, panel] = open_store(cfg);
    const auto& samples = store.samples;
    const PosteriorMeans means = posterior_means(samples);
    const StabilityTable stab = stability_table(samples);
    const auto corr = popularity_correlations(panel, samples);
    const auto ci = tau_intervals(samples, cfg.level);

    json tau = json::array();
    for (std::size_t k = 0; k < ci.size(); ++k)
        tau.push_back({{"time", k + 2}, {"mean", ci[k].mean}, {"lower", ci[k].lower}, {"upper", ci[k].upper}});
    json summary = {{"draws", samples.size()},
                    {"pseudo_r2", pseudo_r2(panel, samples)},
                    {"corr_step_log_reach", corr.step_vs_log_reach},
                    {"corr_log_reach_mean_rank", corr.log_reach_vs_mean_rank},
                    {"theta", means.theta},
                    {"tau0", means.tau0},
                    {"tau1", means.tau1},
                    {"tau", tau},
                    {"interval_level", cfg.level},
                    {"r", means.r},
                    {"step_sizes", step_sizes(samples)},
                    {"stability", stab}};
    const json manifest = json::parse(store.manifest);
    if (manifest.contains("acceptance")) summary["acceptance"] = manifest["acceptance"];

    const fs::path out = output_for(cfg, cfg.input);
    fs::create_directories(out);
    write_json(out / "summary.json", summary);
    std::ofstream st(out / "stability.csv");
    st << std::setprecision(std::numeric_limits<double>::max_digits10);
    st << "row\\col";
    for (std::size_t b = 0; b < stab.size(); ++b) st << ",tau" << b + 2;
    st << '\n';
    for (std::size_t a = 0; a < stab.size(); ++a) {
        st << "tau" << a + 2;
        for (double q : stab[a]) st << ',' << q;
        st << '\n';
    }
    std::cout << std::setprecision(4) << "pseudo-R2 " << summary["pseudo_r2"].get<double>()
              << ", corr(step, log r) " << corr.step_vs_log_reach << ", corr(log r, mean rank) "
              << corr.log_reach_vs_mean_rank << '\n';
    return kOk;
}

int cmd_regions(const RunConfig& cfg) {
    const auto [store, panel] = open_store(cfg);
    if (store.p != 2) throw ConfigError("credible regions need p = 2");
    const fs::path out = output_for(cfg, fs::path(cfg.input) / "regions");
    fs::create_directories(out);
    int t_first = 0, t_last = store.T - 1;
    if (cfg.time) {
        if (*cfg.time < 1 || *cfg.time > store.T) throw ConfigError("--time must lie in 1..T");
        t_first = t_last = *cfg.time - 1;
    }
    json clusters_out = json::object();
    for (int t = t_first; t <= t_last; ++t) {
        std::vector<std::vector<Point2>> clouds;
        for (int i = 0; i < store.n; ++i) clouds.push_back(actor_draws(store.samples, t, i));
        const GridFrame frame = common_frame(clouds);
        std::vector<CredibleRegion> regions;
        for (int i = 0; i < store.n; ++i)
            regions.push_back(credible_region(clouds[std::size_t(i)], cfg.level, i, t, &frame));
        const IntMatrix overlap = overlap_graph(regions);
        const std::string tag = std::to_string(t + 1);
        write_int_matrix(out / ("overlap_t" + tag + ".csv"), overlap);

        std::ofstream raster(out / ("raster_t" + tag + ".csv"));
        raster << std::setprecision(std::numeric_limits<double>::max_digits10);
        raster << "actor,a,b,x,y\n";
        for (const auto& reg : regions)
            for (int cell : reg.cells)
                raster << reg.actor + 1 << ',' << cell / frame.ny << ',' << cell % frame.ny << ','
                       << frame.cx(cell / frame.ny) << ',' << frame.cy(cell % frame.ny) << '\n';
        write_json(out / ("frame_t" + tag + ".json"), {{"x0", frame.x0},
                                                       {"y0", frame.y0},
                                                       {"dx", frame.dx},
                                                       {"dy", frame.dy},
                                                       {"nx", frame.nx},
                                                       {"ny", frame.ny},
                                                       {"level", cfg.level}});
        if (cfg.k_given || (cfg.k >= 2 && cfg.k <= store.n)) {
            const Clustering cl = cluster_subgroups(overlap, cfg.k, cfg.seed);
            std::vector<int> labels;
            for (int l : cl.labels) labels.push_back(l + 1);
            clusters_out[tag] = {{"labels", labels}, {"objective", cl.objective}};
        }
    }
    if (!clusters_out.empty()) write_json(out / "clusters.json", clusters_out);
    std::cout << "wrote regions for " << (t_last - t_first + 1) << " time point(s) to " << out.string() << '\n';
    return kOk;
}

int cmd_report(const RunConfig& cfg) {
    const auto [store, panel] = open_store(cfg);
    const PosteriorMeans means = posterior_means(store.samples);
    const auto ci = tau_intervals(store.samples, cfg.level);
    Traces traces;
    const fs::path trace_file = fs::path(cfg.input) / "traces.csv";
    if (fs::exists(trace_file)) traces = read_traces_csv(trace_file);
    const fs::path out = output_for(cfg, fs::path(cfg.input) / "report");
    write_report(out, means, ci, traces);
    std::cout << "wrote report to " << out.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent-space Plackett-Luce model for ranked dynamic networks"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "Panel file (fit) or sample store directory");
        sub->add_option("--output-dir", cfg.output_dir, "Output directory");
        sub->add_option("--seed", cfg.seed, "Random seed");
    };

    auto* fit = app.add_subcommand("fit", "Initialize and run the sampler");
    add_common(fit);
    fit->get_option("--input")->required()->check(CLI::ExistingFile);
    fit->add_option("--iterations", cfg.iterations, "Total sweeps")->check(CLI::PositiveNumber);
    fit->add_option("--burn-in", cfg.burn_in, "Sweeps discarded before storing draws")->check(CLI::NonNegativeNumber);
    fit->add_option("--thin", cfg.thin, "Keep every thin-th draw")->check(CLI::PositiveNumber);
    fit->add_option("--p", cfg.p, "Latent dimension")->check(CLI::PositiveNumber);
    fit->add_option("--kappa", cfg.kappa, "Dirichlet proposal concentration")->check(CLI::PositiveNumber);
    fit->add_option("--chains", cfg.chains, "Independent chains")->check(CLI::PositiveNumber);
    fit->add_option("--top-q", cfg.top_q, "Use only the top q ranks of each row");
    fit->add_flag("--exact-tau-path", cfg.exact_tau_path, "Include the forward factor in the precision-path draw");

    auto* sim = app.add_subcommand("simulate", "Generate a panel from the model");
    add_common(sim);
    sim->add_option("--n", cfg.sim_n, "Actors")->check(CLI::Range(2, 100000));
    sim->add_option("--T", cfg.sim_T, "Time points")->check(CLI::PositiveNumber);
    sim->add_option("--p", cfg.p, "Latent dimension")->check(CLI::PositiveNumber);

    auto* sum = app.add_subcommand("summarize", "Scalar summaries from a sample store");
    add_common(sum);
    sum->get_option("--input")->required();
    sum->add_option("--level", cfg.level, "Credible interval level")->check(CLI::Range(0.0, 1.0));

    auto* reg = app.add_subcommand("regions", "Credible regions, overlap graphs and clusters");
    add_common(reg);
    reg->get_option("--input")->required();
    reg->add_option("--level", cfg.level, "Region level")->check(CLI::Range(0.0, 1.0));
    reg->add_option("--k", cfg.k, "Number of clusters");
    reg->add_option("--time", cfg.time, "Single time point (1-based)");

    auto* rep = app.add_subcommand("report", "Plots and their data tables");
    add_common(rep);
    rep->get_option("--input")->required();
    rep->add_option("--level", cfg.level, "Credible interval level")->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        cfg.k_given = reg->count("--k") > 0;
        if (*fit) return cmd_fit(cfg);
        if (*sim) return cmd_simulate(cfg);
        if (*sum) return cmd_summarize(cfg);
        if (*reg) return cmd_regions(cfg);
        if (*rep) return cmd_report(cfg);
    } catch (const ValidationError& e) {
        std::cerr << "invalid data: " << e.what() << '\n';
        return kData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
