#pragma once

#include "navseg/codec_model.hpp"
#include "navseg/domain.hpp"
#include "navseg/partition.hpp"

#include <cstdint>
#include <functional>

namespace navseg {

/// Request timing of a navigation session. `f` is the frame rate, `f_e` the
/// number of frames between requests, `delta` the navigation speed in camera
/// index units per second.
struct BallScheduleParams {
    double f = 30.0;
    std::size_t f_e = 90;
    double tau_max = 1.0;
    double delta = 0.0;
    double T = 90.0;

    std::size_t frame_count() const;    ///< N_f = T f
    std::size_t request_count() const;  ///< N_e = N_f / f_e

    /// Throws unless every field is positive (delta may be zero) and N_f, N_e are integers.
    void validate() const;
};

struct SceneModel {
    double width = 640.0;
    double height = 480.0;
    double focal = 615.0;
    double z_min = 100.0;
    double z_max = 1000.0;
    double d_inp = 100.0;
    double d_rec = 5.0;

    double image_area() const { return width * height; }
    void validate() const;
};

/// Smallest ball time that avoids starvation: f_e / f + tau_max.
double t_star(const BallScheduleParams& p);

/// max(1 - 2 t* delta / N_V, 0)
double g_factor(double t_star_seconds, double delta, std::size_t view_count);

/// (1 - g) N_e + g N_e m, the expected number of requests selecting a segment
/// whose popularity mass is m.
double expected_requests_alpha(double segment_mass, double g, double requests_per_session);

/// Per-request rate under the fixed allocation:
/// (1 - g) sum_k h(V_k) + g sum_k h(V_k) mass(V_k).
double model_rate_cost(const RateTable& table, const Partition& partition, const Popularity& popularity,
                       double g);

/// Hole pixels caused by one pose component alone.
double hole_area_x(double dx, const SceneModel& scene);
double hole_area_y(double dy, const SceneModel& scene);
double hole_area_z(double dz, const SceneModel& scene);
double hole_area_theta(double dtheta, const SceneModel& scene);
double hole_area_phi(double dphi, const SceneModel& scene);
double hole_area_psi(double dpsi, const SceneModel& scene);

/// Upper bound on hole pixels when rendering from a reference displaced by
/// `offset`: the per-component areas summed and capped at W H.
double hole_area_bound(const Pose6D& offset, const SceneModel& scene);

/// Pose change between the viewpoint (pose at r.s plus r.offset) and camera `reference`.
Pose6D reference_offset(const Viewpoint& r, std::size_t reference, const CameraRig& rig);

/// D_inp * Omega + D_rec * (W H - Omega) for a precomputed hole area.
double distortion_from_holes(double hole_pixels, const SceneModel& scene);

double view_distortion(const Viewpoint& r, std::size_t reference, const CameraRig& rig, const SceneModel& scene);

/// Draws viewpoints from the navigation process' visiting distribution.
using ViewpointSampler = std::function<Viewpoint(std::uint64_t sample_index)>;

/// Monte-Carlo estimate of
///   N_f D_rec W H + N_f (D_inp - D_rec) E[Omega(r, c_{l0(r)})]
/// with r drawn by `sampler`.
double expected_distortion_mc(const ViewpointSampler& sampler, std::size_t sample_count, std::size_t frame_count,
                              const CameraRig& rig, const SceneModel& scene);

}  // namespace navseg
