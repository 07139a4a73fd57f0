#include "navseg/rd_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace navseg {

namespace {

bool is_integral(double v) { return std::abs(v - std::round(v)) < 1e-9; }

}  // namespace

std::size_t BallScheduleParams::frame_count() const {
    return static_cast<std::size_t>(std::llround(T * f));
}

std::size_t BallScheduleParams::request_count() const {
    return f_e == 0 ? 0 : frame_count() / f_e;
}

void BallScheduleParams::validate() const {
    if (!(f > 0.0)) throw ValidationError("schedule.f must be positive");
    if (!(T > 0.0)) throw ValidationError("schedule.T must be positive");
    if (f_e == 0) throw ValidationError("schedule.f_e must be positive");
    if (!(tau_max >= 0.0)) throw ValidationError("schedule.tau_max must be non-negative");
    if (!(delta >= 0.0)) throw ValidationError("schedule.delta must be non-negative");
    if (!is_integral(T * f)) throw ValidationError("schedule: N_f = T * f must be an integer");
    if (frame_count() % f_e != 0) throw ValidationError("schedule: N_e = N_f / f_e must be an integer");
}

void SceneModel::validate() const {
    if (!(width > 0.0 && height > 0.0)) throw ValidationError("scene: image dimensions must be positive");
    if (!(focal > 0.0)) throw ValidationError("scene.focal must be positive");
    if (!(z_min > 0.0 && z_min <= z_max)) throw ValidationError("scene: need 0 < z_min <= z_max");
    if (!(d_rec >= 0.0 && d_inp >= d_rec)) throw ValidationError("scene: need D_inp >= D_rec >= 0");
}

double t_star(const BallScheduleParams& p) {
    return static_cast<double>(p.f_e) / p.f + p.tau_max;
}

double g_factor(double t_star_seconds, double delta, std::size_t view_count) {
    return std::max(1.0 - 2.0 * t_star_seconds * delta / static_cast<double>(view_count), 0.0);
}

double expected_requests_alpha(double segment_mass, double g, double requests_per_session) {
    const double alpha0 = requests_per_session * segment_mass;
    return (1.0 - g) * requests_per_session + g * alpha0;
}

double model_rate_cost(const RateTable& table, const Partition& partition, const Popularity& popularity,
                       double g) {
    double storage_like = 0.0;
    double basic_rate = 0.0;
    for (std::size_t k = 1; k <= partition.segment_count(); ++k) {
        const ViewRange seg = partition.segment(k);
        const double bits = segment_cost(table, seg);
        storage_like += bits;
        basic_rate += bits * popularity.mass(seg);
    }
    return (1.0 - g) * storage_like + g * basic_rate;
}

// ---------------------------------------------------------------------------
// Hole-area bounds for single-reference rendering. Each component is treated
// independently; the combined bound is their sum capped at the image area.

double hole_area_x(double dx, const SceneModel& scene) {
    return scene.focal * scene.height * std::abs(dx) / scene.z_min;
}

double hole_area_y(double dy, const SceneModel& scene) {
    return scene.focal * scene.width * std::abs(dy) / scene.z_min;
}

double hole_area_z(double dz, const SceneModel& scene) {
    // moving forward is a zoom-in, everything is recovered by interpolation
    if (dz <= 0.0) return 0.0;
    return 2.0 * scene.height * scene.width * dz / scene.z_min;
}

double hole_area_theta(double dtheta, const SceneModel& scene) {
    return scene.focal * scene.width * std::abs(wrap_angle(dtheta));
}

double hole_area_phi(double dphi, const SceneModel& scene) {
    return scene.focal * scene.height * std::abs(wrap_angle(dphi));
}

double hole_area_psi(double dpsi, const SceneModel& scene) {
    double a = std::abs(wrap_angle(dpsi));
    if (a > std::numbers::pi / 2) a = std::numbers::pi - a;
    // The uncovered area is invariant under transposing the image, so the
    // two-branch form is evaluated with the long side as W.
    const double w = std::max(scene.width, scene.height);
    const double h = std::min(scene.width, scene.height);
    const double threshold = 2.0 * std::atan(h / w);
    double area = 0.0;
    if (a < threshold) {
        const double u = std::tan(a / 2.0);
        area = std::tan(a) / 4.0 * ((h * h + w * w) * (1.0 + u * u) - 4.0 * w * h * u);
    } else {
        area = w * h - h * h / std::sin(a);
    }
    return std::clamp(area, 0.0, w * h);
}

double hole_area_bound(const Pose6D& offset, const SceneModel& scene) {
    const double total = hole_area_x(offset.x, scene) + hole_area_y(offset.y, scene) +
                         hole_area_z(offset.z, scene) + hole_area_theta(offset.theta, scene) +
                         hole_area_phi(offset.phi, scene) + hole_area_psi(offset.psi, scene);
    return std::min(total, scene.image_area());
}

Pose6D reference_offset(const Viewpoint& r, std::size_t reference, const CameraRig& rig) {
    const Pose6D base = rig.pose_at(r.s);
    const Pose6D target{base.x + r.offset.x,         base.y + r.offset.y,     base.z + r.offset.z,
                        base.theta + r.offset.theta, base.phi + r.offset.phi, base.psi + r.offset.psi};
    return pose_difference(target, rig.pose(reference));
}

double distortion_from_holes(double hole_pixels, const SceneModel& scene) {
    const double omega = std::clamp(hole_pixels, 0.0, scene.image_area());
    return scene.d_inp * omega + scene.d_rec * (scene.image_area() - omega);
}

double view_distortion(const Viewpoint& r, std::size_t reference, const CameraRig& rig, const SceneModel& scene) {
    return distortion_from_holes(hole_area_bound(reference_offset(r, reference, rig), scene), scene);
}

double expected_distortion_mc(const ViewpointSampler& sampler, std::size_t sample_count, std::size_t frame_count,
                              const CameraRig& rig, const SceneModel& scene) {
    if (sample_count == 0) throw ValidationError("Monte-Carlo estimate needs at least one sample");
    double hole_sum = 0.0;
    for (std::size_t i = 0; i < sample_count; ++i) {
        const Viewpoint r = sampler(i);
        hole_sum += hole_area_bound(reference_offset(r, nearest_camera(r, rig), rig), scene);
    }
    const double mean_holes = hole_sum / static_cast<double>(sample_count);
    const double frames = static_cast<double>(frame_count);
    return frames * scene.d_rec * scene.image_area() + frames * (scene.d_inp - scene.d_rec) * mean_holes;
}

}  // namespace navseg
