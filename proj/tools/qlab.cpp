// Command-line front end: single runs, lambda sweeps, lookahead-window
// sweeps, the resource-pooling simulator and the validation suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qlab/experiment.hpp"
#include "qlab/pooling.hpp"
#include "qlab/validate.hpp"

namespace {

using nlohmann::json;

// Accepts "0.95" or the near-one form "1-1e-3".
double parse_lambda_value(const std::string& s) {
    if (s.rfind("1-", 0) == 0) return 1.0 - std::stod(s.substr(2));
    return std::stod(s);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

// "a,b,c" or "start:end:5log" / "start:end:5lin". Log grids over lambda are
// spaced in the gap 1-lambda.
std::vector<double> parse_grid(const std::string& spec, bool lambda_grid) {
    std::vector<double> out;
    if (spec.find(':') == std::string::npos) {
        for (const auto& tok : split(spec, ','))
            out.push_back(lambda_grid ? parse_lambda_value(tok) : std::stod(tok));
        return out;
    }
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw CLI::ValidationError("grid must be start:end:<K>log|lin");
    const double a = lambda_grid ? parse_lambda_value(parts[0]) : std::stod(parts[0]);
    const double b = lambda_grid ? parse_lambda_value(parts[1]) : std::stod(parts[1]);
    std::string last = parts[2];
    bool log_spaced = true;
    if (last.size() >= 3 && last.substr(last.size() - 3) == "lin") {
        log_spaced = false;
        last = last.substr(0, last.size() - 3);
    } else if (last.size() >= 3 && last.substr(last.size() - 3) == "log") {
        last = last.substr(0, last.size() - 3);
    }
    const int k = std::stoi(last);
    if (k < 1) throw CLI::ValidationError("grid size must be >= 1");
    for (int i = 0; i < k; ++i) {
        const double f = k == 1 ? 0.0 : static_cast<double>(i) / (k - 1);
        if (!log_spaced) {
            out.push_back(a + f * (b - a));
        } else if (lambda_grid) {
            const double g = std::exp(std::log(1.0 - a) + f * (std::log(1.0 - b) - std::log(1.0 - a)));
            out.push_back(1.0 - g);
        } else {
            if (a <= 0.0 || b <= 0.0)
                throw CLI::ValidationError("log grid endpoints must be positive");
            out.push_back(std::exp(std::log(a) + f * (std::log(b) - std::log(a))));
        }
    }
    return out;
}

struct CliOptions {
    qlab::ExperimentConfig cfg;
    std::string lambda_grid;
    std::string policy = "nob";
    std::int64_t threshold_L = 0;  // 0: optimal_threshold(p, lambda)
    double window = 0.0;           // 0: window_c * ln(1/(1-lambda))
    std::int64_t greedy_k = 0;     // 0: largest feasible budget
    std::string config_file;
};

void add_common_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--lambda", o.lambda_grid, "arrival rate, or a comma list");
    cmd->add_option("--lambda-grid", o.lambda_grid,
                    "lambda grid, e.g. 1-1e-1:1-1e-3:5log or 0.92,0.99");
    cmd->add_option("--p", o.cfg.p, "redirection budget in (0,1)");
    cmd->add_option("--policy", o.policy,
                    "comma list of threshold|nob|nob-window|sigma-window|greedy");
    cmd->add_option("--threshold-L", o.threshold_L, "threshold level (0 = smallest feasible)");
    cmd->add_option("--window", o.window, "lookahead window in time units (0 = from --window-c)");
    cmd->add_option("--window-c", o.cfg.window_c, "window scale: w = c*ln(1/(1-lambda))");
    cmd->add_option("--greedy-k", o.greedy_k, "greedy deletion budget (0 = rate-feasible count)");
    cmd->add_option("--slots", o.cfg.horizon_slots, "horizon in event slots");
    cmd->add_option("--seed", o.cfg.seed_base, "base seed; replication k uses seed+k");
    cmd->add_option("--replications", o.cfg.replications, "independent replications");
    cmd->add_option("--burn-in", o.cfg.burn_in, "slots dropped before averaging");
    cmd->add_option("--out", o.cfg.output_path, "CSV output path");
    cmd->add_option("--config", o.config_file, "JSON config file; flags override it");
}

qlab::PolicySpec parse_policy(const std::string& name, const CliOptions& o) {
    if (name == "threshold") return qlab::ThresholdPolicy{o.threshold_L};
    if (name == "nob") return qlab::NobPolicy{};
    if (name == "nob-window") return qlab::NobWindowPolicy{o.window};
    if (name == "sigma-window") return qlab::SigmaWindowPolicy{o.window};
    if (name == "greedy") return qlab::GreedyPolicy{0, o.greedy_k};
    throw CLI::ValidationError("unknown policy: " + name);
}

qlab::PolicySpec policy_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "threshold") return qlab::ThresholdPolicy{j.value("L", std::int64_t{0})};
    if (kind == "nob") return qlab::NobPolicy{};
    if (kind == "nob-window") return qlab::NobWindowPolicy{j.value("w", 0.0)};
    if (kind == "sigma-window") return qlab::SigmaWindowPolicy{j.value("w", 0.0)};
    if (kind == "greedy")
        return qlab::GreedyPolicy{j.value("horizon", std::int64_t{0}),
                                  j.value("budget", std::int64_t{0})};
    throw CLI::ValidationError("unknown policy kind in config: " + kind);
}

// Config file fills anything the command line leaves at its default.
void load_config(CLI::App* cmd, CliOptions& o) {
    if (o.config_file.empty()) return;
    std::ifstream in(o.config_file);
    if (!in) throw CLI::ValidationError("cannot open config file: " + o.config_file);
    json j;
    in >> j;
    const auto flag_given = [&](const std::string& name) {
        const CLI::Option* opt = cmd->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (j.contains("lambdas") && !flag_given("--lambda") && !flag_given("--lambda-grid")) {
        o.cfg.lambdas.clear();
        for (const auto& v : j["lambdas"]) o.cfg.lambdas.push_back(v.get<double>());
        o.lambda_grid.clear();
    }
    if (j.contains("p") && !flag_given("--p")) o.cfg.p = j["p"].get<double>();
    if (j.contains("policies") && !flag_given("--policy")) {
        o.cfg.policies.clear();
        for (const auto& pj : j["policies"]) o.cfg.policies.push_back(policy_from_json(pj));
        o.policy.clear();
    }
    if (j.contains("horizon_slots") && !flag_given("--slots"))
        o.cfg.horizon_slots = j["horizon_slots"].get<std::int64_t>();
    if (j.contains("replications") && !flag_given("--replications"))
        o.cfg.replications = j["replications"].get<int>();
    if (j.contains("seed_base") && !flag_given("--seed"))
        o.cfg.seed_base = j["seed_base"].get<std::uint64_t>();
    if (j.contains("burn_in") && !flag_given("--burn-in"))
        o.cfg.burn_in = j["burn_in"].get<std::int64_t>();
    if (j.contains("window_c") && !flag_given("--window-c"))
        o.cfg.window_c = j["window_c"].get<double>();
    if (j.contains("greedy_budget") && !flag_given("--greedy-k"))
        o.cfg.greedy_budget = j["greedy_budget"].get<std::int64_t>();
    if (j.contains("output_path") && !flag_given("--out"))
        o.cfg.output_path = j["output_path"].get<std::string>();
}

void finish_config(CLI::App* cmd, CliOptions& o) {
    load_config(cmd, o);
    if (!o.lambda_grid.empty()) o.cfg.lambdas = parse_grid(o.lambda_grid, true);
    if (!o.policy.empty()) {
        o.cfg.policies.clear();
        for (const auto& name : split(o.policy, ','))
            o.cfg.policies.push_back(parse_policy(name, o));
    }
    if (o.greedy_k > 0) o.cfg.greedy_budget = o.greedy_k;
}

void emit_rows(const std::vector<qlab::RunResult>& rows, const std::string& out_path) {
    std::cerr << "# rng=mt19937-64/splitmix64 rows=" << rows.size() << "\n";
    if (!out_path.empty()) {
        qlab::write_csv(rows, out_path);
        std::cerr << "# wrote " << out_path << "\n";
    } else {
        std::cout << qlab::csv_document(rows);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"queueing admissions-control laboratory"};
    app.require_subcommand(1);

    CliOptions sim_o, sweep_o, dual_o;
    sweep_o.policy = "threshold,nob,nob-window";

    CLI::App* sim = app.add_subcommand("simulate", "single policy at a single lambda");
    add_common_flags(sim, sim_o);

    CLI::App* sw = app.add_subcommand("sweep", "lambda grid x policy grid");
    add_common_flags(sw, sweep_o);

    CLI::App* dual = app.add_subcommand("duality", "window sweep at a fixed lambda");
    add_common_flags(dual, dual_o);
    std::string window_grid = "0.25:64:9log";
    dual->add_option("--window-grid", window_grid, "w grid, e.g. 0.25:64:9log or 0,1,2,4");

    CLI::App* pool = app.add_subcommand("pool", "resource-pooling simulator");
    qlab::PoolingConfig pool_cfg;
    std::string pool_n = "10";
    std::string pool_sched = "threshold";
    std::string pool_out;
    int pool_reps = 1;
    pool_cfg.params = qlab::ModelParams{0.95, 0.1};
    pool->add_option("--n", pool_n, "comma list of station counts");
    pool->add_option("--epsilon", pool_cfg.epsilon, "redirection slack in (0,p); 0 = p/5");
    pool->add_option("--scheduler", pool_sched, "lqf|threshold");
    pool->add_option("--lambda", pool_cfg.params.lambda, "per-station arrival rate");
    pool->add_option("--p", pool_cfg.params.p, "pooled fraction of capacity");
    pool->add_option("--events", pool_cfg.horizon_events, "merged event horizon");
    pool->add_option("--seed", pool_cfg.seed, "base seed");
    pool->add_option("--replications", pool_reps, "independent replications");
    pool->add_option("--out", pool_out, "CSV output path");

    CLI::App* val = app.add_subcommand("validate", "run the acceptance criteria");
    qlab::ValidationOptions val_opts;
    std::vector<int> val_only;
    std::string val_out;
    val->add_flag("--quick", val_opts.quick, "1e6-slot variants with widened tolerances");
    val->add_option("--seed", val_opts.seed_base, "base seed");
    val->add_option("--criterion", val_only, "run only the given criterion ids");
    val->add_option("--out", val_out, "CSV of the runs performed by the suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            if (sim_o.lambda_grid.empty() && sim_o.config_file.empty())
                sim_o.lambda_grid = "0.95";
            finish_config(sim, sim_o);
            sim_o.cfg.policies.resize(1);  // single run: one policy
            emit_rows(qlab::sweep(sim_o.cfg), sim_o.cfg.output_path);
        } else if (sw->parsed()) {
            if (sweep_o.lambda_grid.empty() && sweep_o.config_file.empty())
                sweep_o.lambda_grid = "1-1e-1:1-1e-3:5log";
            finish_config(sw, sweep_o);
            emit_rows(qlab::sweep(sweep_o.cfg), sweep_o.cfg.output_path);
        } else if (dual->parsed()) {
            if (dual_o.lambda_grid.empty()) dual_o.lambda_grid = "0.99";
            finish_config(dual, dual_o);
            const auto grid = parse_grid(window_grid, false);
            emit_rows(qlab::duality_sweep(dual_o.cfg, grid), dual_o.cfg.output_path);
        } else if (pool->parsed()) {
            if (pool_sched == "lqf")
                pool_cfg.scheduler = qlab::Scheduler::LQF;
            else if (pool_sched == "threshold")
                pool_cfg.scheduler = qlab::Scheduler::DistributedThreshold;
            else
                throw qlab::parameter_error("scheduler must be lqf or threshold");
            std::string doc =
                "scheduler,n_stations,lambda,p,epsilon,horizon_events,seed,threshold_L,"
                "mean_local_queue,mean_central_queue,central_rate_in,redirect_rate_min,"
                "redirect_rate_mean,redirect_rate_max\n";
            for (const auto& tok : split(pool_n, ',')) {
                pool_cfg.n_stations = std::stoi(tok);
                const std::uint64_t base_seed = pool_cfg.seed;
                for (int rep = 0; rep < pool_reps; ++rep) {
                    qlab::PoolingConfig c = pool_cfg;
                    c.seed = base_seed + static_cast<std::uint64_t>(rep);
                    const qlab::PoolingStats st = qlab::run_pooling(c);
                    double mn = 0.0, mx = 0.0, mean = 0.0;
                    if (!st.per_station_redirect_rates.empty()) {
                        mn = mx = st.per_station_redirect_rates[0];
                        for (double v : st.per_station_redirect_rates) {
                            mn = std::min(mn, v);
                            mx = std::max(mx, v);
                            mean += v;
                        }
                        mean /= static_cast<double>(st.per_station_redirect_rates.size());
                    }
                    char buf[512];
                    std::snprintf(buf, sizeof(buf),
                                  "%s,%d,%.12g,%.12g,%.12g,%lld,%llu,%lld,%.12g,%.12g,%.12g,"
                                  "%.12g,%.12g,%.12g\n",
                                  pool_sched.c_str(), c.n_stations, c.params.lambda, c.params.p,
                                  c.epsilon, static_cast<long long>(c.horizon_events),
                                  static_cast<unsigned long long>(c.seed),
                                  static_cast<long long>(st.threshold_L), st.mean_local_queue,
                                  st.mean_central_queue, st.central_rate_in, mn, mean, mx);
                    doc += buf;
                }
            }
            if (!pool_out.empty()) {
                std::ofstream out(pool_out, std::ios::binary);
                out << doc;
                std::cerr << "# wrote " << pool_out << "\n";
            } else {
                std::cout << doc;
            }
        } else if (val->parsed()) {
            const qlab::ValidationReport rep = qlab::run_validation(val_opts, val_only);
            for (const auto& r : rep.results)
                std::printf("criterion %2d %s %s: %s\n", r.id, r.pass ? "PASS" : "FAIL",
                            r.name.c_str(), r.detail.c_str());
            if (!val_out.empty()) {
                qlab::write_csv(rep.rows, val_out);
                std::cerr << "# wrote " << val_out << "\n";
            }
            return rep.all_pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
