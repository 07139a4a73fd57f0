#pragma once

#include "navseg/allocation.hpp"
#include "navseg/codec_model.hpp"
#include "navseg/domain.hpp"
#include "navseg/partition.hpp"
#include "navseg/rd_models.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace navseg {

/// Frame-by-frame viewpoints of one user. Frame i * request_interval is the
/// i-th requested viewpoint.
struct NavigationPath {
    std::vector<Viewpoint> frames;
    std::size_t request_interval = 1;

    std::size_t request_count() const { return frames.size() / request_interval; }
    const Viewpoint& request(std::size_t i) const { return frames[i * request_interval]; }
};

/// Random walk over camera views: the first requested view is drawn from the
/// popularity, each following one from the popularity restricted to views
/// within delta * f_e / f of the previous one. Frames in between are linear in
/// the manifold coordinate. Throws if a restricted popularity has zero mass.
NavigationPath generate_path(const BallScheduleParams& schedule, const Popularity& popularity, std::uint64_t seed);

/// Adds an offset drawn uniformly in [-m, m) per component at every requested
/// frame (and one past the end); intermediate frames interpolate the offsets.
NavigationPath add_virtual_shift(const NavigationPath& path, const Pose6D& magnitudes, std::uint64_t seed);

struct SessionConfig {
    BallScheduleParams schedule;
    const Popularity& popularity;
    const Partition& partition;
    const RateTable& rates;
    const CameraRig& rig;
    const SceneModel& scene;
    AllocationConfig allocation;
    std::size_t path_count = 100;
    std::uint64_t seed = 1;
    std::optional<Pose6D> virtual_shift;
};

struct SessionTrace {
    std::vector<AllocationDecision> requests;
    std::vector<double> frame_distortion;
    std::vector<double> frame_holes;
    std::vector<std::size_t> frame_reference;
    double total_bits = 0.0;
    double total_distortion = 0.0;
    double total_holes = 0.0;
    std::size_t starved_frames = 0;
    std::size_t success_count = 0;

    std::size_t frame_count() const { return frame_distortion.size(); }
    std::size_t request_count() const { return requests.size(); }
};

/// Allocation decisions for every requested viewpoint of a path, without
/// client memory or frame rendering. Enough for request-count statistics.
SessionTrace allocate_requests(const NavigationPath& path, const Partition& partition, const RateTable& rates,
                               const AllocationConfig& allocation);

/// First frame at which the data of a request is available, relative to the request.
std::size_t delivery_lag_frames(const BallScheduleParams& schedule);

/// Plays a path against the server: allocates at every requested viewpoint,
/// then renders each frame from the data of the latest delivered request.
SessionTrace run_session(const SessionConfig& cfg, const NavigationPath& path);

/// Path i uses derive_seed(cfg.seed, i); the optional virtual shift uses
/// derive_seed(cfg.seed ^ shift_stream_salt, i).
inline constexpr std::uint64_t shift_stream_salt = 0x5EED5EED5EED5EEDULL;
NavigationPath session_path(const SessionConfig& cfg, std::size_t index);
std::vector<SessionTrace> simulate_sessions(const SessionConfig& cfg);

struct SessionSummary {
    std::size_t paths = 0;
    double mean_rate_bits = 0.0;       ///< per request
    double mean_distortion = 0.0;      ///< per path
    double mean_hole_pixels = 0.0;     ///< per frame
    double success_rate = 0.0;
    double starvation_rate = 0.0;
    double mean_session_bits = 0.0;
};

/// Means over traces, reduced in trace order.
SessionSummary aggregate_sessions(const std::vector<SessionTrace>& traces);

struct SegmentAlpha {
    std::size_t segment = 0;
    double measured = 0.0;
    double model = 0.0;
};

/// Mean number of requests per path that selected each segment, next to the
/// closed-form expectation for the given g.
std::vector<SegmentAlpha> measure_empirical_alpha(const std::vector<SessionTrace>& traces, const Partition& partition,
                                                  const Popularity& popularity, double g);

/// Distortion expectation with viewpoints sampled from generated sessions
/// (frames of paths derive_seed(seed, 0), derive_seed(seed, 1), ...).
double expected_distortion_mc(const Popularity& popularity, const BallScheduleParams& schedule, const CameraRig& rig,
                              const SceneModel& scene, std::size_t sample_count, std::uint64_t seed,
                              std::optional<Pose6D> virtual_shift = std::nullopt);

}  // namespace navseg
