#include "navseg/simulator.hpp"

#include "navseg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace navseg {

NavigationPath generate_path(const BallScheduleParams& schedule, const Popularity& popularity, std::uint64_t seed) {
    schedule.validate();
    const std::size_t n_views = popularity.size();
    const std::size_t requests = schedule.request_count();
    const std::size_t interval = schedule.f_e;
    const double step_radius = schedule.delta * static_cast<double>(interval) / schedule.f;

    Rng rng(seed);
    // one anchor past the last request shapes the tail frames
    std::vector<std::size_t> anchors;
    anchors.reserve(requests + 1);
    anchors.push_back(rng.pick(popularity.values()) + 1);
    while (anchors.size() < requests + 1) {
        const double prev = static_cast<double>(anchors.back());
        const ViewRange reach = ball_view_range(NavigationBall{on_manifold(prev), step_radius}, n_views);
        auto window = popularity.values().subspan(reach.lo - 1, reach.size());
        if (!(popularity.mass(reach) > 0.0)) {
            throw ValidationError("popularity has no mass within reach of view " + std::to_string(anchors.back()));
        }
        anchors.push_back(reach.lo + rng.pick(window));
    }

    NavigationPath path;
    path.request_interval = interval;
    path.frames.reserve(requests * interval);
    for (std::size_t i = 0; i < requests; ++i) {
        const double a = static_cast<double>(anchors[i]);
        const double b = static_cast<double>(anchors[i + 1]);
        for (std::size_t j = 0; j < interval; ++j) {
            const double w = static_cast<double>(j) / static_cast<double>(interval);
            path.frames.push_back(on_manifold(a + w * (b - a)));
        }
    }
    return path;
}

NavigationPath add_virtual_shift(const NavigationPath& path, const Pose6D& magnitudes, std::uint64_t seed) {
    Rng rng(seed);
    auto draw = [&rng](double m) { return m > 0.0 ? rng.uniform(-m, m) : 0.0; };
    const std::size_t interval = path.request_interval;
    const std::size_t anchor_count = (path.frames.size() + interval - 1) / interval + 1;
    std::vector<Pose6D> anchors(anchor_count);
    for (Pose6D& o : anchors) {
        o = {draw(magnitudes.x),     draw(magnitudes.y),   draw(magnitudes.z),
             draw(magnitudes.theta), draw(magnitudes.phi), draw(magnitudes.psi)};
    }

    NavigationPath shifted = path;
    for (std::size_t k = 0; k < shifted.frames.size(); ++k) {
        const std::size_t i = k / interval;
        const double w = static_cast<double>(k % interval) / static_cast<double>(interval);
        const Pose6D& a = anchors[i];
        const Pose6D& b = anchors[i + 1];
        auto lerp = [w](double u, double v) { return u + w * (v - u); };
        shifted.frames[k].offset = {lerp(a.x, b.x),         lerp(a.y, b.y),     lerp(a.z, b.z),
                                    lerp(a.theta, b.theta), lerp(a.phi, b.phi), lerp(a.psi, b.psi)};
    }
    return shifted;
}

SessionTrace allocate_requests(const NavigationPath& path, const Partition& partition, const RateTable& rates,
                               const AllocationConfig& allocation) {
    SessionTrace trace;
    trace.requests.reserve(path.request_count());
    for (std::size_t i = 0; i < path.request_count(); ++i) {
        trace.requests.push_back(allocate(path.request(i), partition, rates, allocation));
        trace.total_bits += trace.requests.back().transmitted_bits;
    }
    return trace;
}

std::size_t delivery_lag_frames(const BallScheduleParams& schedule) {
    return static_cast<std::size_t>(std::ceil(schedule.tau_max * schedule.f - 1e-9));
}

SessionTrace run_session(const SessionConfig& cfg, const NavigationPath& path) {
    const std::size_t requests = path.request_count();
    if (requests == 0) throw ValidationError("path has no requested viewpoints");
    if (cfg.partition.view_count() != cfg.rates.size()) {
        throw ValidationError("partition and rate table disagree on N_V");
    }
    const double ball_radius = cfg.allocation.t_star * cfg.allocation.delta;
    const double radius_slack = 1e-9 * std::max(1.0, ball_radius);

    SessionTrace trace;
    trace.requests.reserve(requests);
    std::vector<std::vector<ViewRange>> available(requests);
    std::set<std::size_t> history;
    for (std::size_t i = 0; i < requests; ++i) {
        AllocationDecision decision = allocate(path.request(i), cfg.partition, cfg.rates, cfg.allocation);
        if (cfg.allocation.memory_aware) {
            AllocationDecision sent = dedup_against_memory(decision, history, cfg.partition, cfg.rates);
            history.insert(decision.segments.begin(), decision.segments.end());
            available[i] = segment_views(cfg.partition, std::vector<std::size_t>(history.begin(), history.end()));
            decision = std::move(sent);
        } else {
            available[i] = segment_views(cfg.partition, decision.segments);
        }
        trace.total_bits += decision.transmitted_bits;
        trace.requests.push_back(std::move(decision));
    }

    const std::size_t lag = delivery_lag_frames(cfg.schedule);
    const std::size_t interval = path.request_interval;
    const double half_image = cfg.scene.image_area() / 2.0;
    const std::size_t frames = path.frames.size();
    trace.frame_distortion.reserve(frames);
    trace.frame_holes.reserve(frames);
    trace.frame_reference.reserve(frames);
    for (std::size_t k = 0; k < frames; ++k) {
        // the first request's data is in place when the session starts
        const std::size_t governing = k < lag ? 0 : std::min((k - lag) / interval, requests - 1);
        const Viewpoint& r = path.frames[k];
        if (distance(r, path.request(governing)) > ball_radius + radius_slack) ++trace.starved_frames;

        const std::size_t reference = render_reference_for(r.s, available[governing]);
        const double holes = hole_area_bound(reference_offset(r, reference, cfg.rig), cfg.scene);
        const double d = distortion_from_holes(holes, cfg.scene);
        trace.frame_reference.push_back(reference);
        trace.frame_holes.push_back(holes);
        trace.frame_distortion.push_back(d);
        trace.total_holes += holes;
        trace.total_distortion += d;
        if (holes < half_image) ++trace.success_count;
    }
    return trace;
}

NavigationPath session_path(const SessionConfig& cfg, std::size_t index) {
    NavigationPath path = generate_path(cfg.schedule, cfg.popularity, derive_seed(cfg.seed, index));
    if (cfg.virtual_shift) {
        path = add_virtual_shift(path, *cfg.virtual_shift, derive_seed(cfg.seed ^ shift_stream_salt, index));
    }
    return path;
}

std::vector<SessionTrace> simulate_sessions(const SessionConfig& cfg) {
    if (cfg.path_count < 1) throw ValidationError("path_count must be at least 1");
    cfg.allocation.validate();
    std::vector<SessionTrace> traces;
    traces.reserve(cfg.path_count);
    for (std::size_t i = 0; i < cfg.path_count; ++i) traces.push_back(run_session(cfg, session_path(cfg, i)));
    return traces;
}

SessionSummary aggregate_sessions(const std::vector<SessionTrace>& traces) {
    if (traces.empty()) throw ValidationError("cannot aggregate zero sessions");
    SessionSummary s;
    s.paths = traces.size();
    double frames = 0.0, success = 0.0, starved = 0.0, holes = 0.0;
    for (const SessionTrace& t : traces) {
        s.mean_rate_bits += t.total_bits / static_cast<double>(t.request_count());
        s.mean_session_bits += t.total_bits;
        s.mean_distortion += t.total_distortion;
        holes += t.total_holes;
        frames += static_cast<double>(t.frame_count());
        success += static_cast<double>(t.success_count);
        starved += static_cast<double>(t.starved_frames);
    }
    const double n = static_cast<double>(traces.size());
    s.mean_rate_bits /= n;
    s.mean_session_bits /= n;
    s.mean_distortion /= n;
    s.mean_hole_pixels = frames > 0.0 ? holes / frames : 0.0;
    s.success_rate = frames > 0.0 ? success / frames : 0.0;
    s.starvation_rate = frames > 0.0 ? starved / frames : 0.0;
    return s;
}

std::vector<SegmentAlpha> measure_empirical_alpha(const std::vector<SessionTrace>& traces, const Partition& partition,
                                                  const Popularity& popularity, double g) {
    if (traces.empty()) throw ValidationError("cannot measure alpha from zero sessions");
    std::vector<SegmentAlpha> out(partition.segment_count());
    for (const SessionTrace& t : traces) {
        for (const AllocationDecision& d : t.requests) {
            for (std::size_t k : d.segments) out[k - 1].measured += 1.0;
        }
    }
    const double requests = static_cast<double>(traces.front().request_count());
    for (std::size_t k = 1; k <= out.size(); ++k) {
        out[k - 1].segment = k;
        out[k - 1].measured /= static_cast<double>(traces.size());
        out[k - 1].model = expected_requests_alpha(popularity.mass(partition.segment(k)), g, requests);
    }
    return out;
}

double expected_distortion_mc(const Popularity& popularity, const BallScheduleParams& schedule, const CameraRig& rig,
                              const SceneModel& scene, std::size_t sample_count, std::uint64_t seed,
                              std::optional<Pose6D> virtual_shift) {
    if (sample_count == 0) throw ValidationError("Monte-Carlo estimate needs at least one sample");
    std::vector<Viewpoint> pool;
    pool.reserve(sample_count);
    for (std::size_t i = 0; pool.size() < sample_count; ++i) {
        NavigationPath path = generate_path(schedule, popularity, derive_seed(seed, i));
        if (virtual_shift) path = add_virtual_shift(path, *virtual_shift, derive_seed(seed ^ shift_stream_salt, i));
        for (const Viewpoint& v : path.frames) {
            if (pool.size() == sample_count) break;
            pool.push_back(v);
        }
    }
    return expected_distortion_mc([&pool](std::uint64_t i) { return pool[i]; }, sample_count,
                                  schedule.frame_count(), rig, scene);
}

}  // namespace navseg
