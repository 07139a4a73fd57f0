#include "navseg/experiment.hpp"

#include <fstream>
#include <set>

namespace navseg {

using nlohmann::json;

namespace {

/// Walks one JSON object, reporting type errors and unknown keys with their dotted path.
class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ValidationError(where() + ": expected an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!node_.contains(key)) return;
        const json& v = node_.at(key);
        try {
            out = convert<T>(v);
        } catch (const json::exception&) {
            throw ValidationError(at(key) + ": invalid value " + v.dump());
        }
    }

    template <class T>
    void get_optional(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        if (!node_.contains(key)) return;
        if (node_.at(key).is_null()) {
            out.reset();
            return;
        }
        T value{};
        get(key, value);
        out = value;
    }

    bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }

    Reader child(const char* key) {
        seen_.insert(key);
        return Reader(node_.at(key), at(key));
    }

    const json& raw(const char* key) {
        seen_.insert(key);
        return node_.at(key);
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!seen_.contains(it.key())) throw ValidationError(at(it.key()) + ": unknown key");
        }
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    template <class T>
    static T convert(const json& v) {
        if constexpr (std::is_same_v<T, std::filesystem::path>) {
            return std::filesystem::path(v.get<std::string>());
        } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_integer() || v.get<long long>() < 0) {
                throw json::type_error::create(302, "expected non-negative integer", &v);
            }
            return v.get<T>();
        } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
            T out;
            for (const json& e : v) out.push_back(convert<std::size_t>(e));
            return out;
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw json::type_error::create(302, "expected number", &v);
            return v.get<double>();
        } else {
            return v.get<T>();
        }
    }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

Pose6D read_pose(Reader r) {
    Pose6D p;
    r.get("x", p.x);
    r.get("y", p.y);
    r.get("z", p.z);
    r.get("theta", p.theta);
    r.get("phi", p.phi);
    r.get("psi", p.psi);
    r.finish();
    return p;
}

json pose_json(const Pose6D& p) {
    return {{"x", p.x}, {"y", p.y}, {"z", p.z}, {"theta", p.theta}, {"phi", p.phi}, {"psi", p.psi}};
}

template <class T>
json optional_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_same_v<T, std::filesystem::path>) {
        return v->generic_string();
    } else {
        return *v;
    }
}

}  // namespace

Method parse_method(const std::string& name) {
    if (name == "NBPA") return Method::nbpa;
    if (name == "NBPU") return Method::nbpu;
    if (name == "Baseline") return Method::baseline;
    if (name == "Baseline-NB") return Method::baseline_nb;
    throw ValidationError("unknown method '" + name + "' (expected NBPA, NBPU, Baseline or Baseline-NB)");
}

std::string to_string(Method method) {
    switch (method) {
        case Method::nbpa: return "NBPA";
        case Method::nbpu: return "NBPU";
        case Method::baseline: return "Baseline";
        case Method::baseline_nb: return "Baseline-NB";
    }
    return "unknown";
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    Reader root(j, "");
    root.get("seed", c.seed);
    root.get("output_dir", c.output_dir);
    root.get_optional("width_cap", c.width_cap);

    if (root.has("rig")) {
        Reader r = root.child("rig");
        r.get("N_V", c.view_count);
        r.get("baseline", c.baseline);
        r.get_optional("pose_file", c.pose_file);
        r.finish();
    } else {
        root.get("rig", c.view_count);  // marks the key as seen
    }

    if (root.has("rates")) {
        const json& list = root.raw("rates");
        if (!list.is_array() || list.empty()) throw ValidationError("rates: expected a non-empty list");
        c.rates.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            Reader r(list[i], "rates[" + std::to_string(i) + "]");
            RateSource src;
            r.get("q_label", src.q_label);
            r.get_optional("file", src.file);
            r.get("mode", src.synth_mode);
            r.get("mean_I", src.mean_intra);
            r.get("mean_P", src.mean_predicted);
            r.get("spread", src.spread);
            r.get("seed", src.seed);
            r.get("D_rec", src.d_rec);
            r.finish();
            if (src.synth_mode != "constant" && src.synth_mode != "random") {
                throw ValidationError(r.at("mode") + ": expected 'constant' or 'random'");
            }
            c.rates.push_back(src);
        }
    }

    if (root.has("popularity")) {
        Reader r = root.child("popularity");
        std::string kind = to_string(c.popularity.kind);
        r.get("kind", kind);
        try {
            c.popularity.kind = parse_popularity_kind(kind);
        } catch (const ValidationError& e) {
            throw ValidationError(r.at("kind") + ": " + e.what());
        }
        c.popularity.shape = default_shape(c.popularity.kind);
        r.get("mean_fraction", c.popularity.shape.mean_fraction);
        r.get("stddev_fraction", c.popularity.shape.stddev_fraction);
        r.get_optional("file", c.popularity.file);
        r.finish();
    }

    if (root.has("schedule")) {
        Reader r = root.child("schedule");
        r.get("f", c.schedule.f);
        r.get("T", c.schedule.T);
        r.get("tau_max", c.schedule.tau_max);
        r.finish();
    }

    if (root.has("scene")) {
        Reader r = root.child("scene");
        r.get("W", c.scene.width);
        r.get("H", c.scene.height);
        r.get("focal", c.scene.focal);
        r.get("z_min", c.scene.z_min);
        r.get("z_max", c.scene.z_max);
        r.get("D_inp", c.scene.d_inp);
        r.finish();
    }

    if (root.has("sweep")) {
        Reader r = root.child("sweep");
        r.get("mu", c.mu_sweep);
        r.get("delta", c.delta_sweep);
        r.get("f_e", c.f_e_sweep);
        r.get("t_S", c.t_s_sweep);
        std::vector<std::string> methods;
        r.get("methods", methods);
        if (!methods.empty()) {
            c.methods.clear();
            for (const auto& m : methods) {
                try {
                    c.methods.push_back(parse_method(m));
                } catch (const ValidationError& e) {
                    throw ValidationError(r.at("methods") + ": " + e.what());
                }
            }
        } else if (r.has("methods")) {
            c.methods.clear();
        }
        r.finish();
    }

    if (root.has("simulate")) {
        Reader r = root.child("simulate");
        r.get("path_count", c.simulation.path_count);
        r.get("memory_aware", c.simulation.memory_aware);
        r.get_optional("sample_count", c.simulation.sample_count);
        r.get("trace", c.simulation.trace);
        if (r.has("virtual_shift")) {
            c.simulation.virtual_shift = read_pose(r.child("virtual_shift"));
        } else {
            std::optional<double> ignored;
            r.get_optional("virtual_shift", ignored);
        }
        r.finish();
    }

    if (root.has("alpha")) {
        Reader r = root.child("alpha");
        r.get("N_V", c.alpha.view_count);
        r.get("N_K", c.alpha.segment_count);
        r.get("path_count", c.alpha.path_count);
        r.get("delta", c.alpha.delta);
        std::string kind = to_string(c.alpha.popularity);
        r.get("popularity", kind);
        c.alpha.popularity = parse_popularity_kind(kind);
        r.get("t_star_grid", c.alpha.t_star_grid);
        r.finish();
    }

    if (root.has("oracle")) {
        Reader r = root.child("oracle");
        r.get("instances", c.oracle.instances);
        r.get("min_views", c.oracle.min_views);
        r.get("max_views", c.oracle.max_views);
        r.get("min_I", c.oracle.min_intra);
        r.get("max_I", c.oracle.max_intra);
        r.get("p_ratio_min", c.oracle.predicted_ratio_min);
        r.get("p_ratio_max", c.oracle.predicted_ratio_max);
        r.get("tolerance", c.oracle.tolerance);
        r.finish();
    }

    root.finish();
    c.validate();
    return c;
}

json ExperimentConfig::to_json() const {
    json rates_json = json::array();
    for (const RateSource& r : rates) {
        rates_json.push_back({{"q_label", r.q_label},
                              {"file", optional_json(r.file)},
                              {"mode", r.synth_mode},
                              {"mean_I", r.mean_intra},
                              {"mean_P", r.mean_predicted},
                              {"spread", r.spread},
                              {"seed", r.seed},
                              {"D_rec", r.d_rec}});
    }
    json methods_json = json::array();
    for (Method m : methods) methods_json.push_back(to_string(m));

    return {
        {"seed", seed},
        {"output_dir", output_dir.generic_string()},
        {"width_cap", optional_json(width_cap)},
        {"rig", {{"N_V", view_count}, {"baseline", baseline}, {"pose_file", optional_json(pose_file)}}},
        {"rates", rates_json},
        {"popularity",
         {{"kind", to_string(popularity.kind)},
          {"mean_fraction", popularity.shape.mean_fraction},
          {"stddev_fraction", popularity.shape.stddev_fraction},
          {"file", optional_json(popularity.file)}}},
        {"schedule", {{"f", schedule.f}, {"T", schedule.T}, {"tau_max", schedule.tau_max}}},
        {"scene",
         {{"W", scene.width},
          {"H", scene.height},
          {"focal", scene.focal},
          {"z_min", scene.z_min},
          {"z_max", scene.z_max},
          {"D_inp", scene.d_inp}}},
        {"sweep",
         {{"mu", mu_sweep}, {"delta", delta_sweep}, {"f_e", f_e_sweep}, {"t_S", t_s_sweep}, {"methods", methods_json}}},
        {"simulate",
         {{"path_count", simulation.path_count},
          {"memory_aware", simulation.memory_aware},
          {"sample_count", optional_json(simulation.sample_count)},
          {"virtual_shift", simulation.virtual_shift ? pose_json(*simulation.virtual_shift) : json(nullptr)},
          {"trace", simulation.trace}}},
        {"alpha",
         {{"N_V", alpha.view_count},
          {"N_K", alpha.segment_count},
          {"path_count", alpha.path_count},
          {"delta", alpha.delta},
          {"popularity", to_string(alpha.popularity)},
          {"t_star_grid", alpha.t_star_grid}}},
        {"oracle",
         {{"instances", oracle.instances},
          {"min_views", oracle.min_views},
          {"max_views", oracle.max_views},
          {"min_I", oracle.min_intra},
          {"max_I", oracle.max_intra},
          {"p_ratio_min", oracle.predicted_ratio_min},
          {"p_ratio_max", oracle.predicted_ratio_max},
          {"tolerance", oracle.tolerance}}},
    };
}

void ExperimentConfig::validate() const {
    if (view_count < 1) throw ValidationError("rig.N_V: must be at least 1");
    if (!(baseline >= 0.0)) throw ValidationError("rig.baseline: must be non-negative");
    if (rates.empty()) throw ValidationError("rates: at least one rate source required");
    if (mu_sweep.empty()) throw ValidationError("sweep.mu: must not be empty");
    if (delta_sweep.empty()) throw ValidationError("sweep.delta: must not be empty");
    if (f_e_sweep.empty()) throw ValidationError("sweep.f_e: must not be empty");
    if (methods.empty()) throw ValidationError("sweep.methods: must not be empty");
    for (double mu : mu_sweep) {
        if (!(mu >= 0.0)) throw ValidationError("sweep.mu: values must be non-negative");
    }
    for (double d : delta_sweep) {
        if (!(d >= 0.0)) throw ValidationError("sweep.delta: values must be non-negative");
    }
    for (double t : t_s_sweep) {
        if (!(t >= 0.0)) throw ValidationError("sweep.t_S: values must be non-negative");
    }
    for (std::size_t fe : f_e_sweep) {
        BallScheduleParams s = schedule;
        s.f_e = fe;
        try {
            s.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("sweep.f_e: ") + e.what());
        }
        const double ts_max = t_star(s);
        for (double t : t_s_sweep) {
            if (t > ts_max + 1e-12) {
                throw ValidationError("sweep.t_S: " + std::to_string(t) + " exceeds t* = " + std::to_string(ts_max) +
                                      " for f_e = " + std::to_string(fe));
            }
        }
    }
    try {
        scene.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("scene: ") + e.what());
    }
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i].d_rec >= 0.0 && rates[i].d_rec <= scene.d_inp)) {
            throw ValidationError("rates[" + std::to_string(i) + "].D_rec: need 0 <= D_rec <= scene.D_inp");
        }
    }
    if (popularity.shape.stddev_fraction < 0.0) throw ValidationError("popularity.stddev_fraction: must be >= 0");
    if (popularity.kind == PopularityKind::custom && !popularity.file) {
        throw ValidationError("popularity.file: required for kind 'custom'");
    }
    if (width_cap && *width_cap < 1) throw ValidationError("width_cap: must be at least 1");
    if (simulation.path_count < 1) throw ValidationError("simulate.path_count: must be at least 1");
    if (simulation.sample_count && *simulation.sample_count < 1) {
        throw ValidationError("simulate.sample_count: must be at least 1");
    }
    if (alpha.segment_count < 1 || alpha.segment_count > alpha.view_count) {
        throw ValidationError("alpha.N_K: need 1 <= N_K <= N_V");
    }
    if (alpha.path_count < 1) throw ValidationError("alpha.path_count: must be at least 1");
    if (alpha.t_star_grid.empty()) throw ValidationError("alpha.t_star_grid: must not be empty");
    if (oracle.min_views < 1 || oracle.min_views > oracle.max_views ||
        oracle.max_views > brute_force_view_limit) {
        throw ValidationError("oracle: need 1 <= min_views <= max_views <= 20");
    }
    if (!(oracle.min_intra > 0.0 && oracle.min_intra <= oracle.max_intra)) {
        throw ValidationError("oracle: need 0 < min_I <= max_I");
    }
    if (!(oracle.predicted_ratio_min > 0.0 && oracle.predicted_ratio_min <= oracle.predicted_ratio_max)) {
        throw ValidationError("oracle: need 0 < p_ratio_min <= p_ratio_max");
    }
    if (!(oracle.predicted_ratio_max < 1.0)) {
        throw ValidationError("oracle.p_ratio_max: P-frames must cost less than I-frames (ratio < 1)");
    }
}

json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path.string());
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void apply_override(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("override '" + assignment + "' must look like key.path=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &tree;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError("override '" + assignment + "' has an empty key segment");
        if (!node->is_object()) *node = json::object();
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

}  // namespace navseg
