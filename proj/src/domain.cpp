#include "navseg/domain.hpp"

#include "navseg/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace navseg {

double wrap_angle(double radians) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(radians + std::numbers::pi, two_pi);
    if (wrapped < 0.0) wrapped += two_pi;
    wrapped -= std::numbers::pi;
    // fmod can land exactly on +pi after the shift back
    if (wrapped >= std::numbers::pi) wrapped -= two_pi;
    return wrapped;
}

Pose6D pose_difference(const Pose6D& a, const Pose6D& b) {
    return {a.x - b.x,
            a.y - b.y,
            a.z - b.z,
            wrap_angle(a.theta - b.theta),
            wrap_angle(a.phi - b.phi),
            wrap_angle(a.psi - b.psi)};
}

CameraRig::CameraRig(std::vector<Pose6D> poses) : poses_(std::move(poses)) {
    if (poses_.empty()) throw ValidationError("camera rig must contain at least one camera");
}

CameraRig CameraRig::linear(std::size_t count, double baseline) {
    if (count == 0) throw ValidationError("camera rig must contain at least one camera");
    std::vector<Pose6D> poses(count);
    for (std::size_t i = 0; i < count; ++i) poses[i].x = static_cast<double>(i) * baseline;
    return CameraRig(std::move(poses));
}

CameraRig CameraRig::load_csv(const std::filesystem::path& path) {
    auto table = io::read_csv(path);
    const std::vector<std::string> expected{"index", "x", "y", "z", "theta", "phi", "psi"};
    if (table.header != expected) {
        throw ValidationError(path.string() + ": expected header index,x,y,z,theta,phi,psi");
    }
    std::vector<Pose6D> poses;
    poses.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (io::parse_int(row[0], "index") != static_cast<long long>(i + 1)) {
            throw ValidationError(path.string() + ": pose rows must be numbered 1..N_V in order");
        }
        poses.push_back({io::parse_double(row[1], "x"), io::parse_double(row[2], "y"),
                         io::parse_double(row[3], "z"), io::parse_double(row[4], "theta"),
                         io::parse_double(row[5], "phi"), io::parse_double(row[6], "psi")});
    }
    return CameraRig(std::move(poses));
}

const Pose6D& CameraRig::pose(std::size_t index) const {
    if (index < 1 || index > poses_.size()) {
        throw ValidationError("camera index " + std::to_string(index) + " outside [1, " +
                              std::to_string(poses_.size()) + "]");
    }
    return poses_[index - 1];
}

Pose6D CameraRig::pose_at(double s) const {
    const double n = static_cast<double>(poses_.size());
    s = std::clamp(s, 1.0, n);
    auto lo = static_cast<std::size_t>(std::floor(s));
    if (lo >= poses_.size()) return poses_.back();
    const double w = s - static_cast<double>(lo);
    const Pose6D& a = poses_[lo - 1];
    const Pose6D& b = poses_[lo];
    auto lerp = [w](double u, double v) { return u + w * (v - u); };
    auto lerp_angle = [w](double u, double v) { return wrap_angle(u + w * wrap_angle(v - u)); };
    return {lerp(a.x, b.x),          lerp(a.y, b.y),        lerp(a.z, b.z),
            lerp_angle(a.theta, b.theta), lerp_angle(a.phi, b.phi), lerp_angle(a.psi, b.psi)};
}

Viewpoint on_manifold(double s) { return Viewpoint{s, {}}; }

double distance(const Viewpoint& a, const Viewpoint& b) { return std::abs(a.s - b.s); }

std::size_t nearest_camera(double s, std::size_t view_count) {
    const double n = std::ceil(s - 0.5);
    if (n <= 1.0) return 1;
    if (n >= static_cast<double>(view_count)) return view_count;
    return static_cast<std::size_t>(n);
}

std::size_t nearest_camera(const Viewpoint& r, const CameraRig& rig) {
    return nearest_camera(r.s, rig.count());
}

ViewRange ball_view_range(const NavigationBall& ball, std::size_t view_count) {
    const double s = ball.center.s;
    const double r = std::max(ball.radius, 0.0);
    const std::size_t nearest = nearest_camera(s, view_count);
    const double lo = std::max(std::ceil(s - r), 1.0);
    const double hi = std::min(std::floor(s + r), static_cast<double>(view_count));
    if (lo > hi) return {nearest, nearest};
    return {std::min(static_cast<std::size_t>(lo), nearest), std::max(static_cast<std::size_t>(hi), nearest)};
}

ViewRange ball_reference_range(const NavigationBall& ball, std::size_t view_count) {
    const double r = std::max(ball.radius, 0.0);
    return {nearest_camera(ball.center.s - r, view_count), nearest_camera(ball.center.s + r, view_count)};
}

// ---------------------------------------------------------------------------

PopularityKind parse_popularity_kind(const std::string& name) {
    if (name == "uniform") return PopularityKind::uniform;
    if (name == "center") return PopularityKind::center;
    if (name == "right") return PopularityKind::right;
    if (name == "custom") return PopularityKind::custom;
    throw ValidationError("unknown popularity kind '" + name + "'");
}

std::string to_string(PopularityKind kind) {
    switch (kind) {
        case PopularityKind::uniform: return "uniform";
        case PopularityKind::center: return "center";
        case PopularityKind::right: return "right";
        case PopularityKind::custom: return "custom";
    }
    return "unknown";
}

GaussianShape default_shape(PopularityKind kind) {
    if (kind == PopularityKind::right) return {0.9, 1.0 / 6.0};
    return {0.5, 1.0 / 6.0};
}

Popularity::Popularity(std::vector<double> p) : p_(std::move(p)), prefix_(p_.size() + 1, 0.0) {
    for (std::size_t i = 0; i < p_.size(); ++i) prefix_[i + 1] = prefix_[i] + p_[i];
}

Popularity Popularity::from_weights(std::vector<double> weights) {
    if (weights.empty()) throw ValidationError("popularity needs at least one view");
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw ValidationError("popularity weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw ValidationError("popularity weights sum to zero");
    for (double& w : weights) w /= total;
    return Popularity(std::move(weights));
}

Popularity Popularity::uniform(std::size_t view_count) {
    return from_weights(std::vector<double>(view_count, 1.0));
}

Popularity Popularity::gaussian(std::size_t view_count, GaussianShape shape) {
    if (view_count == 0) throw ValidationError("popularity needs at least one view");
    if (!(shape.stddev_fraction >= 0.0)) throw ValidationError("popularity stddev must be non-negative");
    const double n = static_cast<double>(view_count);
    const double mean = 1.0 + shape.mean_fraction * (n - 1.0);
    const double sigma = shape.stddev_fraction * n;

    std::vector<double> w(view_count, 0.0);
    double total = 0.0;
    if (sigma > 0.0) {
        for (std::size_t i = 0; i < view_count; ++i) {
            const double z = (static_cast<double>(i + 1) - mean) / sigma;
            w[i] = std::exp(-0.5 * z * z);
            total += w[i];
        }
    }
    if (!(total > 0.0)) {
        std::fill(w.begin(), w.end(), 0.0);
        w[nearest_camera(mean, view_count) - 1] = 1.0;
    }
    return from_weights(std::move(w));
}

Popularity Popularity::make(PopularityKind kind, std::size_t view_count, GaussianShape shape) {
    switch (kind) {
        case PopularityKind::uniform: return uniform(view_count);
        case PopularityKind::center:
        case PopularityKind::right: return gaussian(view_count, shape);
        case PopularityKind::custom: break;
    }
    throw ValidationError("custom popularity must be loaded from a file");
}

Popularity Popularity::load_csv(const std::filesystem::path& path) {
    auto table = io::read_csv(path);
    if (table.header != std::vector<std::string>{"index", "p"}) {
        throw ValidationError(path.string() + ": expected header index,p");
    }
    std::vector<double> p;
    p.reserve(table.rows.size());
    double total = 0.0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (io::parse_int(row[0], "index") != static_cast<long long>(i + 1)) {
            throw ValidationError(path.string() + ": popularity rows must be numbered 1..N_V in order");
        }
        double v = io::parse_double(row[1], "p");
        if (v < 0.0) throw ValidationError(path.string() + ": negative popularity at view " + row[0]);
        p.push_back(v);
        total += v;
    }
    if (p.empty()) throw ValidationError(path.string() + ": no popularity rows");
    if (std::abs(total - 1.0) > 0.01) {
        std::ostringstream msg;
        msg << path.string() << ": popularity sums to " << total << ", not within 1% of 1";
        throw ValidationError(msg.str());
    }
    return from_weights(std::move(p));
}

void Popularity::save_csv(const std::filesystem::path& path) const {
    std::string out = "index,p\n";
    for (std::size_t i = 0; i < p_.size(); ++i) {
        out += std::to_string(i + 1) + "," + io::format_double(p_[i]) + "\n";
    }
    io::write_text(path, out);
}

double Popularity::mass(ViewRange range) const {
    if (range.lo < 1 || range.hi > p_.size() || range.lo > range.hi) {
        throw ValidationError("popularity range out of bounds");
    }
    return prefix_[range.hi] - prefix_[range.lo - 1];
}

}  // namespace navseg
