#pragma once

#include "navseg/allocation.hpp"
#include "navseg/codec_model.hpp"
#include "navseg/domain.hpp"
#include "navseg/partition.hpp"
#include "navseg/rd_models.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace navseg {

enum class Method { nbpa, nbpu, baseline, baseline_nb };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct RateSource {
    std::string q_label = "QP25";
    std::optional<std::filesystem::path> file;
    std::string synth_mode = "random";  ///< "constant" or "random" when no file is given
    double mean_intra = 100000.0;
    double mean_predicted = 20000.0;
    double spread = 0.3;
    std::uint64_t seed = 7;
    double d_rec = 5.0;
};

struct PopularitySpec {
    PopularityKind kind = PopularityKind::center;
    GaussianShape shape = default_shape(PopularityKind::center);
    std::optional<std::filesystem::path> file;
};

struct SimulationSpec {
    std::size_t path_count = 100;
    bool memory_aware = false;
    std::optional<std::size_t> sample_count;
    std::optional<Pose6D> virtual_shift;
    bool trace = false;
};

struct AlphaSpec {
    std::size_t view_count = 1000;
    std::size_t segment_count = 8;
    std::size_t path_count = 500;
    double delta = 20.0;
    PopularityKind popularity = PopularityKind::uniform;
    std::vector<double> t_star_grid{0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 15, 20, 25, 50};
};

struct OracleSpec {
    std::size_t instances = 200;
    std::size_t min_views = 2;
    std::size_t max_views = 12;
    double min_intra = 10.0;
    double max_intra = 200.0;
    /// h_P is drawn as a fraction of h_I in [predicted_ratio_min, predicted_ratio_max].
    double predicted_ratio_min = 0.01;
    double predicted_ratio_max = 0.99;
    double tolerance = 1e-9;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t view_count = 450;
    double baseline = 0.5;
    std::optional<std::filesystem::path> pose_file;
    std::vector<RateSource> rates{RateSource{}};
    PopularitySpec popularity;
    BallScheduleParams schedule;
    SceneModel scene;
    std::vector<double> mu_sweep{0.05};
    std::vector<double> delta_sweep{0, 5, 10, 20};
    std::vector<std::size_t> f_e_sweep{90};
    /// Empty: fixed allocation at t_S = t*. Otherwise heuristic allocation per value (seconds).
    std::vector<double> t_s_sweep;
    std::vector<Method> methods{Method::nbpa, Method::nbpu, Method::baseline, Method::baseline_nb};
    std::optional<std::size_t> width_cap;
    SimulationSpec simulation;
    AlphaSpec alpha;
    OracleSpec oracle;
    std::filesystem::path output_dir = "out";

    /// Parses a config tree; unknown keys and bad values are reported with their key path.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

nlohmann::json load_config_file(const std::filesystem::path& path);

/// Applies `key.path=value` overrides; `value` is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

// ---------------------------------------------------------------------------
// Sweep building blocks

struct SweepPoint {
    std::size_t rate_index = 0;
    std::size_t f_e = 90;
    double delta = 0.0;
    double mu = 0.05;
};

struct PartitionRecord {
    Method method;
    SweepPoint point;
    std::string q_label;
    double t_star = 0.0;
    double g = 1.0;
    Partition partition;
    double cost_total = 0.0;
    double cost_rate = 0.0;
    double cost_storage = 0.0;
};

class Experiment {
public:
    explicit Experiment(ExperimentConfig config);

    const ExperimentConfig& config() const { return config_; }
    const CameraRig& rig() const { return rig_; }
    const Popularity& popularity() const { return popularity_; }
    const RateTable& rates(std::size_t i) const { return rate_tables_[i]; }

    std::vector<SweepPoint> sweep_points() const;
    BallScheduleParams schedule_for(const SweepPoint& point) const;
    PartitionRecord partition_for(Method method, const SweepPoint& point) const;

private:
    ExperimentConfig config_;
    CameraRig rig_;
    Popularity popularity_;
    std::vector<RateTable> rate_tables_;
};

RateTable build_rate_table(const RateSource& source, std::size_t view_count);
Popularity build_popularity(const PopularitySpec& spec, std::size_t view_count);

// ---------------------------------------------------------------------------
// Commands. Each writes its files under config.output_dir and returns an exit
// code: 0 ok, 1 validation error, 2 oracle failure.

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_oracle_failure = 2;

struct RunOptions {
    std::size_t jobs = 1;
    bool quiet = false;
};

int cmd_partition(const ExperimentConfig& config, const RunOptions& options);
int cmd_simulate(const ExperimentConfig& config, const RunOptions& options);
int cmd_validate_alpha(const ExperimentConfig& config, const RunOptions& options);
int cmd_oracle(const ExperimentConfig& config, const RunOptions& options);
int cmd_gen_rates(const ExperimentConfig& config, const RunOptions& options);
int cmd_gen_popularity(const ExperimentConfig& config, const RunOptions& options);

/// Runs `command` by name, turning ValidationError into exit code 1.
int run_command(const std::string& command, const ExperimentConfig& config, const RunOptions& options);

}  // namespace navseg
