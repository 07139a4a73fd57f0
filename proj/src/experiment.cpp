#include "navseg/experiment.hpp"

#include "navseg/io.hpp"
#include "navseg/rng.hpp"
#include "navseg/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace navseg {

using nlohmann::json;

RateTable build_rate_table(const RateSource& source, std::size_t view_count) {
    if (source.file) return RateTable::load_csv(*source.file, source.q_label, view_count);
    if (source.synth_mode == "constant") {
        return RateTable::constant(view_count, source.mean_intra, source.mean_predicted, source.q_label);
    }
    return RateTable::seeded_random(view_count, source.mean_intra, source.mean_predicted, source.spread, source.seed,
                                    source.q_label);
}

Popularity build_popularity(const PopularitySpec& spec, std::size_t view_count) {
    if (spec.kind != PopularityKind::custom) return Popularity::make(spec.kind, view_count, spec.shape);
    if (!spec.file) throw ValidationError("popularity.file: required for kind 'custom'");
    Popularity p = Popularity::load_csv(*spec.file);
    if (p.size() != view_count) {
        throw ValidationError("popularity.file: has " + std::to_string(p.size()) + " views, rig has " +
                              std::to_string(view_count));
    }
    return p;
}

namespace {

CameraRig build_rig(const ExperimentConfig& c) {
    if (!c.pose_file) return CameraRig::linear(c.view_count, c.baseline);
    CameraRig rig = CameraRig::load_csv(*c.pose_file);
    if (rig.count() != c.view_count) {
        throw ValidationError("rig.pose_file: has " + std::to_string(rig.count()) + " cameras, rig.N_V is " +
                              std::to_string(c.view_count));
    }
    return rig;
}

std::vector<RateTable> build_rate_tables(const ExperimentConfig& c) {
    std::vector<RateTable> out;
    for (std::size_t i = 0; i < c.rates.size(); ++i) {
        try {
            out.push_back(build_rate_table(c.rates[i], c.view_count));
        } catch (const ValidationError& e) {
            throw ValidationError("rates[" + std::to_string(i) + "]: " + e.what());
        }
    }
    return out;
}

ExperimentConfig validated(ExperimentConfig c) {
    c.validate();
    return c;
}

std::string provenance_line(const std::string& command, const ExperimentConfig& c) {
    return "# navseg " + command + " seed=" + std::to_string(c.seed) + " config=" + c.to_json().dump() + "\n";
}

/// Prepends the provenance comment to a CSV written by a save_csv routine.
void stamp_csv(const std::filesystem::path& path, const std::string& command, const ExperimentConfig& c) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    in.close();
    io::write_text(path, provenance_line(command, c) + body.str());
}

std::string fmt(double v) { return io::format_double(v); }

double kilobytes(double bits) { return bits / 8000.0; }

/// Runs fn(0..count-1) on up to `jobs` threads. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void log(const RunOptions& options, const std::string& line) {
    if (!options.quiet) std::cerr << line << '\n';
}

std::string join_ends(const Partition& p) {
    std::string s;
    for (std::size_t e : p.ends()) {
        if (!s.empty()) s += ';';
        s += std::to_string(e);
    }
    return s;
}

}  // namespace

Experiment::Experiment(ExperimentConfig config)
    : config_(validated(std::move(config))),
      rig_(build_rig(config_)),
      popularity_(build_popularity(config_.popularity, config_.view_count)),
      rate_tables_(build_rate_tables(config_)) {}

std::vector<SweepPoint> Experiment::sweep_points() const {
    std::vector<SweepPoint> points;
    for (std::size_t r = 0; r < rate_tables_.size(); ++r) {
        for (std::size_t fe : config_.f_e_sweep) {
            for (double delta : config_.delta_sweep) {
                for (double mu : config_.mu_sweep) points.push_back({r, fe, delta, mu});
            }
        }
    }
    return points;
}

BallScheduleParams Experiment::schedule_for(const SweepPoint& point) const {
    BallScheduleParams s = config_.schedule;
    s.f_e = point.f_e;
    s.delta = point.delta;
    s.validate();
    return s;
}

PartitionRecord Experiment::partition_for(Method method, const SweepPoint& point) const {
    const RateTable& table = rate_tables_[point.rate_index];
    const double ts = t_star(schedule_for(point));
    const double g = g_factor(ts, point.delta, config_.view_count);
    const PartitionObjectiveParams truth{table, popularity_, point.mu, g, config_.width_cap};

    std::optional<Partition> partition;
    switch (method) {
        case Method::nbpa:
            partition = solve_optimal(truth);
            break;
        case Method::nbpu: {
            const Popularity uniform = Popularity::uniform(config_.view_count);
            partition = solve_optimal({table, uniform, point.mu, g, config_.width_cap});
            break;
        }
        case Method::baseline:
            partition = baseline_partition(truth, BaselineMode::fixed);
            break;
        case Method::baseline_nb:
            partition = baseline_partition(truth, BaselineMode::nb);
            break;
    }
    PartitionRecord rec{method, point, table.q_label(), ts, g, *partition, 0.0, 0.0, 0.0};
    rec.cost_total = partition_objective(rec.partition, truth);
    rec.cost_rate = model_rate_cost(table, rec.partition, popularity_, g);
    rec.cost_storage = storage_cost(table, rec.partition);
    return rec;
}

int cmd_partition(const ExperimentConfig& config, const RunOptions& options) {
    const Experiment exp(config);
    const auto points = exp.sweep_points();
    const auto& methods = config.methods;
    std::vector<std::optional<PartitionRecord>> records(points.size() * methods.size());
    parallel_for(records.size(), options.jobs, [&](std::size_t i) {
        records[i] = exp.partition_for(methods[i % methods.size()], points[i / methods.size()]);
    });

    json list = json::array();
    std::string csv = provenance_line("partition", config);
    csv += "method,q_label,delta,mu,f_e,t_star,g,N_K,mean_width,cost_total,cost_rate_bits,U_S_bits,U_S_kB,ends\n";
    for (const auto& r : records) {
        list.push_back({{"method", to_string(r->method)},
                        {"q_label", r->q_label},
                        {"delta", r->point.delta},
                        {"mu", r->point.mu},
                        {"f_e", r->point.f_e},
                        {"t_star", r->t_star},
                        {"g", r->g},
                        {"N_K", r->partition.segment_count()},
                        {"mean_width", r->partition.mean_width()},
                        {"ends", r->partition.ends()},
                        {"widths", r->partition.widths()},
                        {"cost_total", r->cost_total},
                        {"cost_rate_bits", r->cost_rate},
                        {"U_S_bits", r->cost_storage}});
        csv += to_string(r->method) + ',' + r->q_label + ',' + fmt(r->point.delta) + ',' + fmt(r->point.mu) + ',' +
               std::to_string(r->point.f_e) + ',' + fmt(r->t_star) + ',' + fmt(r->g) + ',' +
               std::to_string(r->partition.segment_count()) + ',' + fmt(r->partition.mean_width()) + ',' +
               fmt(r->cost_total) + ',' + fmt(r->cost_rate) + ',' + fmt(r->cost_storage) + ',' +
               fmt(kilobytes(r->cost_storage)) + ',' + join_ends(r->partition) + '\n';
    }
    const json doc{{"command", "partition"}, {"seed", config.seed}, {"config", config.to_json()}, {"partitions", list}};
    io::write_text(config.output_dir / "partitions.json", doc.dump(2) + "\n");
    io::write_text(config.output_dir / "partitions.csv", csv);
    log(options, "wrote " + std::to_string(records.size()) + " partitions to " + config.output_dir.string());
    return exit_ok;
}

namespace {

struct SimulationJob {
    SweepPoint point;
    Method method;
    std::optional<double> t_s;  ///< empty: fixed allocation at t*
};

struct SimulationResult {
    PartitionRecord record;
    double t_s = 0.0;
    SessionSummary summary;
    std::string trace_lines;
};

SimulationResult run_simulation_job(const Experiment& exp, const SimulationJob& job) {
    const ExperimentConfig& c = exp.config();
    SimulationResult out{exp.partition_for(job.method, job.point), 0.0, {}, {}};
    const BallScheduleParams schedule = exp.schedule_for(job.point);
    SceneModel scene = c.scene;
    scene.d_rec = c.rates[job.point.rate_index].d_rec;

    AllocationConfig alloc;
    alloc.t_star = out.record.t_star;
    alloc.t_s = job.t_s.value_or(out.record.t_star);
    alloc.delta = job.point.delta;
    alloc.sample_count = c.simulation.sample_count;
    alloc.memory_aware = c.simulation.memory_aware;
    alloc.policy = job.t_s ? AllocationPolicy::heuristic : AllocationPolicy::fixed;
    out.t_s = alloc.t_s;

    const SessionConfig session{schedule,
                                exp.popularity(),
                                out.record.partition,
                                exp.rates(job.point.rate_index),
                                exp.rig(),
                                scene,
                                alloc,
                                c.simulation.path_count,
                                c.seed,
                                c.simulation.virtual_shift};
    const auto traces = simulate_sessions(session);
    out.summary = aggregate_sessions(traces);

    if (c.simulation.trace) {
        for (std::size_t p = 0; p < traces.size(); ++p) {
            for (std::size_t q = 0; q < traces[p].requests.size(); ++q) {
                const AllocationDecision& d = traces[p].requests[q];
                const json line{{"method", to_string(job.method)},
                                {"q_label", out.record.q_label},
                                {"delta", job.point.delta},
                                {"mu", job.point.mu},
                                {"f_e", job.point.f_e},
                                {"t_S", out.t_s},
                                {"path", p},
                                {"request", q},
                                {"s", d.request.s},
                                {"segments", d.segments},
                                {"bits", d.transmitted_bits}};
                out.trace_lines += line.dump() + "\n";
            }
        }
    }
    return out;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& config, const RunOptions& options) {
    const Experiment exp(config);
    std::vector<SimulationJob> jobs;
    for (const SweepPoint& point : exp.sweep_points()) {
        for (Method m : config.methods) {
            if (config.t_s_sweep.empty()) {
                jobs.push_back({point, m, std::nullopt});
            } else {
                for (double ts : config.t_s_sweep) jobs.push_back({point, m, ts});
            }
        }
    }
    std::vector<std::optional<SimulationResult>> results(jobs.size());
    parallel_for(jobs.size(), options.jobs, [&](std::size_t i) { results[i] = run_simulation_job(exp, jobs[i]); });

    std::string csv = provenance_line("simulate", config);
    csv +=
        "method,delta,mu,f_e,t_S,q_label,mean_rate_bits,mean_distortion,success_rate,starvation_rate,N_K,U_S_bits,"
        "mean_rate_kB,U_S_kB,mean_hole_pixels\n";
    std::string trace;
    for (const auto& r : results) {
        const PartitionRecord& rec = r->record;
        const SessionSummary& s = r->summary;
        csv += to_string(rec.method) + ',' + fmt(rec.point.delta) + ',' + fmt(rec.point.mu) + ',' +
               std::to_string(rec.point.f_e) + ',' + fmt(r->t_s) + ',' + rec.q_label + ',' + fmt(s.mean_rate_bits) +
               ',' + fmt(s.mean_distortion) + ',' + fmt(s.success_rate) + ',' + fmt(s.starvation_rate) + ',' +
               std::to_string(rec.partition.segment_count()) + ',' + fmt(rec.cost_storage) + ',' +
               fmt(kilobytes(s.mean_rate_bits)) + ',' + fmt(kilobytes(rec.cost_storage)) + ',' +
               fmt(s.mean_hole_pixels) + '\n';
        trace += r->trace_lines;
    }
    io::write_text(config.output_dir / "summary.csv", csv);
    if (config.simulation.trace) {
        io::write_text(config.output_dir / "requests.jsonl", provenance_line("simulate", config) + trace);
    }
    log(options, "simulated " + std::to_string(jobs.size()) + " configurations x " +
                     std::to_string(config.simulation.path_count) + " paths");
    return exit_ok;
}

int cmd_validate_alpha(const ExperimentConfig& config, const RunOptions& options) {
    const AlphaSpec& a = config.alpha;
    if (a.popularity == PopularityKind::custom) {
        throw ValidationError("alpha.popularity: 'custom' is not supported, use uniform, center or right");
    }
    const Popularity popularity = Popularity::make(a.popularity, a.view_count, default_shape(a.popularity));
    const Partition partition = equidistant_partition(a.view_count, a.segment_count);
    const RateTable rates = RateTable::constant(a.view_count, 2.0, 1.0, "alpha");
    BallScheduleParams schedule = config.schedule;
    schedule.f_e = config.f_e_sweep.front();
    schedule.delta = a.delta;
    schedule.validate();
    const double requests = static_cast<double>(schedule.request_count());

    std::vector<NavigationPath> paths(a.path_count);
    parallel_for(paths.size(), options.jobs, [&](std::size_t i) {
        paths[i] = generate_path(schedule, popularity, derive_seed(config.seed, i));
    });

    std::vector<std::vector<SegmentAlpha>> per_point(a.t_star_grid.size());
    parallel_for(per_point.size(), options.jobs, [&](std::size_t j) {
        const double ts = a.t_star_grid[j];
        AllocationConfig alloc;
        alloc.t_star = ts;
        alloc.t_s = ts;
        alloc.delta = a.delta;
        std::vector<SessionTrace> traces;
        traces.reserve(paths.size());
        for (const NavigationPath& p : paths) traces.push_back(allocate_requests(p, partition, rates, alloc));
        per_point[j] = measure_empirical_alpha(traces, partition, popularity, g_factor(ts, a.delta, a.view_count));
    });

    std::string csv = provenance_line("validate-alpha", config);
    csv += "t_star,t_star_delta,g,segment,mass,alpha_measured,alpha_model,err_over_Ne,rel_err,interior,in_regime\n";
    double worst = 0.0;
    for (std::size_t j = 0; j < per_point.size(); ++j) {
        const double ts = a.t_star_grid[j];
        const double radius = ts * a.delta;
        const bool in_regime = radius <= static_cast<double>(a.view_count) / 6.0;
        for (const SegmentAlpha& s : per_point[j]) {
            const double diff = std::abs(s.measured - s.model);
            const double rel = s.model > 0.0 ? diff / s.model : (diff == 0.0 ? 0.0 : INFINITY);
            const bool interior = s.segment != 1 && s.segment != a.segment_count;
            if (interior && in_regime) worst = std::max(worst, diff / requests);
            csv += fmt(ts) + ',' + fmt(radius) + ',' + fmt(g_factor(ts, a.delta, a.view_count)) + ',' +
                   std::to_string(s.segment) + ',' + fmt(popularity.mass(partition.segment(s.segment))) + ',' +
                   fmt(s.measured) + ',' + fmt(s.model) + ',' + fmt(diff / requests) + ',' + fmt(rel) + ',' +
                   (interior ? "1" : "0") + ',' + (in_regime ? "1" : "0") + '\n';
        }
    }
    io::write_text(config.output_dir / "alpha.csv", csv);
    log(options, "max |alpha_measured - alpha_model| / N_e over interior segments in regime: " + fmt(worst));
    return exit_ok;
}

namespace {

struct OracleInstance {
    RateTable rates;
    Popularity popularity;
    double mu;
    double g;
    bool constant;
};

OracleInstance make_oracle_instance(const OracleSpec& spec, std::uint64_t seed, std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const std::size_t span = spec.max_views - spec.min_views + 1;
    const std::size_t n = spec.min_views + std::min(span - 1, static_cast<std::size_t>(rng.uniform01() * span));
    const bool constant = i % 5 == 0;
    std::vector<double> hi(n), hp(n);
    for (std::size_t v = 0; v < n; ++v) {
        if (constant && v > 0) {
            hi[v] = hi[0];
            hp[v] = hp[0];
            continue;
        }
        hi[v] = rng.uniform(spec.min_intra, spec.max_intra);
        hp[v] = hi[v] * rng.uniform(spec.predicted_ratio_min, spec.predicted_ratio_max);
    }
    std::vector<double> weights(n);
    for (double& w : weights) w = rng.uniform(0.05, 1.0);
    static constexpr double mus[] = {0.0, 0.05, 0.5};
    static constexpr double gs[] = {0.0, 0.5, 1.0};
    return {RateTable("oracle", std::move(hi), std::move(hp)), Popularity::from_weights(std::move(weights)), mus[i % 3],
            gs[(i / 3) % 3], constant};
}

}  // namespace

int cmd_oracle(const ExperimentConfig& config, const RunOptions& options) {
    const OracleSpec& spec = config.oracle;
    struct Row {
        std::size_t views;
        double mu, g;
        bool constant;
        double solver_cost, brute_cost;
        std::size_t solver_k, brute_k;
    };
    std::vector<Row> rows(spec.instances);
    parallel_for(rows.size(), options.jobs, [&](std::size_t i) {
        const OracleInstance inst = make_oracle_instance(spec, config.seed, i);
        const PartitionObjectiveParams params{inst.rates, inst.popularity, inst.mu, inst.g, std::nullopt};
        const Partition solved = solve_optimal(params);
        const BruteForceResult brute = brute_force_optimal(params);
        rows[i] = {inst.rates.size(),
                   inst.mu,
                   inst.g,
                   inst.constant,
                   partition_objective(solved, params),
                   brute.cost,
                   solved.segment_count(),
                   brute.partition.segment_count()};
    });

    std::string csv = provenance_line("oracle", config);
    csv += "instance,N_V,mu,g,constant,solver_cost,brute_cost,abs_diff,solver_N_K,brute_N_K,verdict\n";
    std::size_t failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const double diff = std::abs(r.solver_cost - r.brute_cost);
        const bool pass = diff <= spec.tolerance;
        if (!pass) ++failures;
        const std::string verdict = pass ? "PASS" : "FAIL";
        csv += std::to_string(i) + ',' + std::to_string(r.views) + ',' + fmt(r.mu) + ',' + fmt(r.g) + ',' +
               (r.constant ? "1" : "0") + ',' + fmt(r.solver_cost) + ',' + fmt(r.brute_cost) + ',' + fmt(diff) + ',' +
               std::to_string(r.solver_k) + ',' + std::to_string(r.brute_k) + ',' + verdict + '\n';
        if (!options.quiet) {
            std::cout << "instance " << i << " N_V=" << r.views << " mu=" << fmt(r.mu) << " g=" << fmt(r.g) << ' '
                      << verdict << '\n';
        }
    }
    io::write_text(config.output_dir / "oracle.csv", csv);
    std::cout << (failures == 0 ? "oracle: all " + std::to_string(rows.size()) + " instances match\n"
                                : "oracle: " + std::to_string(failures) + " of " + std::to_string(rows.size()) +
                                      " instances differ\n");
    return failures == 0 ? exit_ok : exit_oracle_failure;
}

int cmd_gen_rates(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    for (const RateTable& table : build_rate_tables(config)) {
        const auto path = config.output_dir / ("rates_" + table.q_label() + ".csv");
        table.save_csv(path);
        stamp_csv(path, "gen-rates", config);
        log(options, "wrote " + path.string());
    }
    return exit_ok;
}

int cmd_gen_popularity(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    const Popularity p = build_popularity(config.popularity, config.view_count);
    const auto path = config.output_dir / "popularity.csv";
    p.save_csv(path);
    stamp_csv(path, "gen-popularity", config);
    log(options, "wrote " + path.string());
    return exit_ok;
}

int run_command(const std::string& command, const ExperimentConfig& config, const RunOptions& options) {
    try {
        if (command == "partition") return cmd_partition(config, options);
        if (command == "simulate") return cmd_simulate(config, options);
        if (command == "validate-alpha") return cmd_validate_alpha(config, options);
        if (command == "oracle") return cmd_oracle(config, options);
        if (command == "gen-rates") return cmd_gen_rates(config, options);
        if (command == "gen-popularity") return cmd_gen_popularity(config, options);
        throw ValidationError("unknown command '" + command + "'");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    }
}

}  // namespace navseg
