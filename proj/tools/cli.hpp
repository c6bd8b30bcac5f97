#pragma once

#include "ttsis/ttsis.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ttsis::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag combination or value detected after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

inline std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw IoError("cannot write " + path.string());
}

inline std::string format_double(double v)
{
    if (std::isinf(v))
        return v < 0 ? "-inf" : "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// chain:N | austria | smallworld:N | smallworld:N:rewire=a,b (1-based labels).
inline Network make_named_network(const std::string& name)
{
    auto fail = [&] { throw UsageError("--make-network: cannot parse '" + name + "'"); };
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used != s.size())
            fail();
        return v;
    };

    std::vector<std::string> parts;
    std::stringstream ss(name);
    for (std::string item; std::getline(ss, item, ':');)
        parts.push_back(item);
    if (parts.empty())
        fail();

    try {
        if (parts[0] == "austria" && parts.size() == 1)
            return make_austria();
        if (parts[0] == "chain" && parts.size() == 2)
            return make_chain(to_int(parts[1]));
        if (parts[0] == "smallworld" && (parts.size() == 2 || parts.size() == 3)) {
            const int n = to_int(parts[1]);
            if (parts.size() == 2)
                return make_small_world(n);
            const std::string& r = parts[2];
            const auto comma = r.find(',');
            if (r.rfind("rewire=", 0) != 0 || comma == std::string::npos)
                fail();
            const int a = to_int(r.substr(7, comma - 7));
            const int b = to_int(r.substr(comma + 1));
            if (a < 1 || b < 1 || a > n || b > n)
                fail();
            return make_small_world(n, std::make_pair(a - 1, b - 1));
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--make-network: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw UsageError(std::string("--make-network: ") + e.what());
    }
    fail();
    return Network{};
}

struct Flags {
    std::string network, obs, obs_dir, truth, out, x0, solver = "tt", proposal = "norepl", init = "score", hist,
        make_network;
    double beta = 1.0, gamma = 0.5, eps = 0.01, tmax = 0.0, tau = 0.0, tt_tol = 1e-6;
    std::size_t ndatasets = 1, nssa = 1000, neval = 400, jobs = 1;
    std::uint64_t seed = 0;
};

inline ModelParams model_params(const Flags& f)
{
    ModelParams p{f.beta, f.gamma, f.eps};
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

inline SolverConfig solver_config(const Flags& f)
{
    SolverConfig cfg;
    cfg.tt_tol = f.tt_tol;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--tt-tol: ") + e.what());
    }
    return cfg;
}

inline LikelihoodOptions likelihood_options(const Flags& f)
{
    return {f.nssa, f.seed, f.jobs};
}

/// Network from a file flag, or from --make-network when the file flag is empty.
inline std::optional<Network> network_from(const std::string& path, const Flags& f)
{
    if (!path.empty() && !f.make_network.empty())
        throw UsageError("give either a network file or --make-network, not both");
    if (!path.empty())
        return parse_network(read_file(path));
    if (!f.make_network.empty())
        return make_named_network(f.make_network);
    return std::nullopt;
}

inline Network require_network(const std::string& path, const Flags& f, const char* flag)
{
    auto net = network_from(path, f);
    if (!net)
        throw UsageError(std::string(flag) + " or --make-network is required");
    return *net;
}

inline ObservationSeries load_observations(const fs::path& path)
{
    try {
        return parse_observations(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline int cmd_simulate(const Flags& f, std::ostream& out)
{
    const Network net = require_network(f.network, f, "--network");
    const ModelParams params = model_params(f);
    if (!(f.tmax > 0.0) || !(f.tau > 0.0))
        throw UsageError("--tmax and --tau must be > 0");
    if (f.ndatasets < 1)
        throw UsageError("--ndatasets must be >= 1");

    NetworkState x0(static_cast<std::size_t>(net.size()));
    if (f.x0.empty())
        x0.set(0, 1);
    else {
        try {
            x0 = NetworkState::from_string(f.x0);
        } catch (const ParseError& e) {
            throw UsageError(std::string("--x0: ") + e.what());
        }
        if (static_cast<int>(x0.size()) != net.size())
            throw UsageError("--x0 length differs from the node count");
    }

    const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
    std::vector<std::string> texts(f.ndatasets);
    parallel_for(f.ndatasets, f.jobs, [&](std::size_t i) {
        Rng rng(f.seed + i);
        const auto traj = simulate_epidemic(net, params, x0, f.tmax, rng);
        texts[i] = serialize_observations(resample_uniform(traj, f.tau, f.tmax));
    });
    for (std::size_t i = 0; i < f.ndatasets; ++i) {
        const fs::path path = dir / ("dataset-" + std::to_string(i) + ".obs");
        write_file(path, texts[i]);
        out << path.string() << '\n';
    }
    return kExitOk;
}

inline int cmd_likelihood(const Flags& f, std::ostream& out)
{
    const Network net = require_network(f.network, f, "--network");
    const ObservationSeries obs = load_observations(f.obs);
    const auto report = log_likelihood(net, model_params(f), obs, *parse_solver(f.solver), solver_config(f),
                                       likelihood_options(f));
    out << "log10_likelihood\t" << format_double(report.log10_like()) << '\n';
    out << "intervals\t" << report.per_interval.size() << '\n';
    out << "n_floored\t" << report.n_floored << '\n';
    out << "n_zero\t" << report.n_zero << '\n';
    out << "n_accuracy_failures\t" << report.n_accuracy_failures << '\n';
    out << "solver\t" << to_string(report.solver_used) << '\n';
    if (!f.hist.empty()) {
        std::string tsv = "k\tlog10_p\n";
        for (std::size_t k = 0; k < report.per_interval.size(); ++k)
            tsv += std::to_string(k + 1) + '\t' + format_double(report.per_interval[k]) + '\n';
        write_file(f.hist, tsv);
    }
    return kExitOk;
}

inline int cmd_infer(const Flags& f, std::ostream& out)
{
    const ObservationSeries obs = load_observations(f.obs);
    if (obs.node_count() < 2)
        throw UsageError("inference needs at least two nodes");
    const auto truth = network_from(f.truth, f);
    if (truth && static_cast<std::size_t>(truth->size()) != obs.node_count())
        throw UsageError("--truth node count differs from the observations");
    const ModelParams params = model_params(f);
    const SolverConfig cfg = solver_config(f);

    Rng rng(f.seed);
    Network g0;
    if (f.init == "score")
        g0 = initial_guess(initial_scores(obs), GuessMode::threshold);
    else if (f.init == "empty")
        g0 = Network(static_cast<int>(obs.node_count()));
    else if (f.init == "random") {
        g0 = Network(static_cast<int>(obs.node_count()));
        for (std::size_t i = 0; i < g0.n_pairs(); ++i)
            if (uniform01(rng) < 0.5)
                g0.toggle_pair(i);
    } else {
        g0 = parse_network(read_file(f.init));
        if (static_cast<std::size_t>(g0.size()) != obs.node_count())
            throw UsageError("--init network node count differs from the observations");
    }

    const auto chain = mcmc_optimize(obs, params, g0, f.neval, *parse_proposal(f.proposal),
                                     *parse_solver(f.solver), cfg, rng, likelihood_options(f));

    const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
    write_file(dir / "chain.tsv", chain_trace_tsv(chain, truth ? &*truth : nullptr));
    write_file(dir / "best.net", serialize_network(chain.best));

    out << "best_log10_likelihood\t" << format_double(chain.best_log_like / std::log(10.0)) << '\n';
    out << "evaluations\t" << chain.evaluations << '\n';
    if (truth)
        out << "distance_to_truth\t" << network_distance(chain.best, *truth) << '\n';
    if (chain.aborted)
        throw SolverError("chain aborted after " + std::to_string(chain.samples.size()) +
                          " samples: " + chain.abort_reason);
    return kExitOk;
}

inline int cmd_contrast(const Flags& f, std::ostream& out)
{
    const Network truth = require_network(f.truth, f, "--truth");
    if (f.obs_dir.empty())
        throw UsageError("--obs-dir is required");
    if (!fs::is_directory(f.obs_dir))
        throw IoError("not a directory: " + f.obs_dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(f.obs_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".obs")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw IoError("no .obs files in " + f.obs_dir);

    std::vector<ObservationSeries> datasets;
    for (const auto& p : files)
        datasets.push_back(load_observations(p));
    const auto contrast = contrast_matrix(truth, datasets, model_params(f), *parse_solver(f.solver),
                                          solver_config(f), likelihood_options(f));
    const std::string tsv = contrast_tsv(contrast);
    if (f.out.empty())
        out << tsv;
    else
        write_file(f.out, tsv);
    return kExitOk;
}

inline int cmd_order(const Flags& f, std::ostream& out)
{
    const Network net = require_network(f.network, f, "--network");
    if (net.size() < 2)
        throw std::invalid_argument("order: need at least two nodes");
    const FiedlerPair fp = fiedler_vector(net);
    out << "lambda1\t" << format_double(fp.lambda1) << '\n';
    for (int node : fiedler_ordering(net).order)
        out << node + 1 << '\n';
    return kExitOk;
}

inline int cmd_network(const Flags& f, std::ostream& out)
{
    const Network net = require_network(f.network, f, "--network");
    if (f.out.empty())
        out << serialize_network(net);
    else
        write_file(f.out, serialize_network(net));
    return kExitOk;
}

/// Runs one command line (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Network inference for epsilon-SIS epidemics with tensor-train master-equation solves", "ttsis"};
    app.require_subcommand(1, 1);
    Flags f;

    auto add_rates = [&](CLI::App* c) {
        c->add_option("--beta", f.beta, "Contact infection rate")->capture_default_str();
        c->add_option("--gamma", f.gamma, "Recovery rate")->capture_default_str();
        c->add_option("--eps", f.eps, "Self-infection rate")->capture_default_str();
    };
    auto add_solver = [&](CLI::App* c) {
        c->add_option("--solver", f.solver, "Forward solver")
            ->check(CLI::IsMember({"tt", "dense", "ssa"}))
            ->capture_default_str();
        c->add_option("--tt-tol", f.tt_tol, "TT accuracy tolerance")->capture_default_str();
        c->add_option("--nssa", f.nssa, "SSA trajectories per interval")
            ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
            ->capture_default_str();
        c->add_option("--seed", f.seed, "Random seed")->capture_default_str();
    };
    auto add_jobs = [&](CLI::App* c) {
        c->add_option("--jobs", f.jobs, "Worker threads")
            ->check(CLI::Range(std::size_t{1}, std::size_t{1024}))
            ->capture_default_str();
    };
    const char* make_help = "chain:N | austria | smallworld:N[:rewire=a,b]";

    auto* sim = app.add_subcommand("simulate", "Generate synthetic observation files");
    sim->add_option("--network", f.network, "Network file");
    sim->add_option("--make-network", f.make_network, make_help);
    sim->add_option("--tmax", f.tmax, "Simulated time span")->required();
    sim->add_option("--tau", f.tau, "Observation step")->required();
    sim->add_option("--ndatasets", f.ndatasets, "Number of datasets")->capture_default_str();
    sim->add_option("--seed", f.seed, "Seed of dataset 0; dataset i uses seed+i")->required();
    sim->add_option("--x0", f.x0, "Initial state bit string (default 10...0)");
    sim->add_option("--out", f.out, "Output directory");
    add_rates(sim);
    add_jobs(sim);

    auto* lik = app.add_subcommand("likelihood", "Evaluate the log-likelihood of observations on a network");
    lik->add_option("--network", f.network, "Network file");
    lik->add_option("--make-network", f.make_network, make_help);
    lik->add_option("--obs", f.obs, "Observation file")->required();
    lik->add_option("--hist", f.hist, "Write per-interval log10 probabilities to this TSV");
    add_rates(lik);
    add_solver(lik);
    add_jobs(lik);

    auto* inf = app.add_subcommand("infer", "Search for the maximum-likelihood network by MCMC");
    inf->add_option("--obs", f.obs, "Observation file")->required();
    inf->add_option("--truth", f.truth, "Reference network for distance tracing");
    inf->add_option("--make-network", f.make_network, "Reference network, " + std::string(make_help));
    inf->add_option("--neval", f.neval, "MCMC steps")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    inf->add_option("--proposal", f.proposal, "Proposal scheme")
        ->check(CLI::IsMember({"toggle", "norepl"}))
        ->capture_default_str();
    inf->add_option("--init", f.init, "score | empty | random | network file")->capture_default_str();
    inf->add_option("--out", f.out, "Output directory for chain.tsv and best.net");
    add_rates(inf);
    add_solver(inf);
    add_jobs(inf);

    auto* con = app.add_subcommand("contrast", "Single-link-toggle likelihood contrast around a network");
    con->add_option("--truth", f.truth, "Reference network file");
    con->add_option("--make-network", f.make_network, make_help);
    con->add_option("--obs-dir", f.obs_dir, "Directory of .obs files")->required();
    con->add_option("--out", f.out, "Output TSV (default stdout)");
    add_rates(con);
    add_solver(con);
    add_jobs(con);

    auto* ord = app.add_subcommand("order", "Print the Fiedler node ordering");
    ord->add_option("--network", f.network, "Network file");
    ord->add_option("--make-network", f.make_network, make_help);

    auto* net = app.add_subcommand("network", "Write a built-in network in file format");
    net->add_option("--network", f.network, "Network file");
    net->add_option("--make-network", f.make_network, make_help);
    net->add_option("--out", f.out, "Output file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(f, out);
        if (lik->parsed())
            return cmd_likelihood(f, out);
        if (inf->parsed())
            return cmd_infer(f, out);
        if (con->parsed())
            return cmd_contrast(f, out);
        if (ord->parsed())
            return cmd_order(f, out);
        return cmd_network(f, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace ttsis::cli
