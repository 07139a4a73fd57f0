#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace navseg {

/// Thrown for any input that violates a documented precondition or file format.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Camera or viewpoint pose: position in scene length units, orientation in radians.
struct Pose6D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    double psi = 0.0;

    friend bool operator==(const Pose6D&, const Pose6D&) = default;
};

/// Wraps an angle into [-pi, pi).
double wrap_angle(double radians);

/// Componentwise difference a - b with angular components wrapped to [-pi, pi).
Pose6D pose_difference(const Pose6D& a, const Pose6D& b);

/// Cameras ordered along a 1-D manifold. View indices are 1-based; neighbouring
/// cameras are one index unit apart.
class CameraRig {
public:
    explicit CameraRig(std::vector<Pose6D> poses);

    /// Straight rig: camera n sits at x = (n - 1) * baseline, all other components zero.
    static CameraRig linear(std::size_t count, double baseline);

    /// CSV with header `index,x,y,z,theta,phi,psi`, rows in index order starting at 1.
    static CameraRig load_csv(const std::filesystem::path& path);

    std::size_t count() const { return poses_.size(); }
    const Pose6D& pose(std::size_t index) const;

    /// Pose at a fractional manifold coordinate, linear in index between neighbours.
    Pose6D pose_at(double s) const;

private:
    std::vector<Pose6D> poses_;
};

/// A position on or near the manifold. `s` is in camera-index units, `offset`
/// is relative to the pose interpolated at `s`.
struct Viewpoint {
    double s = 1.0;
    Pose6D offset{};

    friend bool operator==(const Viewpoint&, const Viewpoint&) = default;
};

Viewpoint on_manifold(double s);

/// Inclusive 1-based index interval.
struct ViewRange {
    std::size_t lo = 1;
    std::size_t hi = 1;

    std::size_t size() const { return hi - lo + 1; }
    bool contains(std::size_t n) const { return lo <= n && n <= hi; }
    friend bool operator==(const ViewRange&, const ViewRange&) = default;
};

struct NavigationBall {
    Viewpoint center;
    double radius = 0.0;
};

double distance(const Viewpoint& a, const Viewpoint& b);

/// Index of the closest camera; half-integer ties go to the lower index.
std::size_t nearest_camera(double s, std::size_t view_count);
std::size_t nearest_camera(const Viewpoint& r, const CameraRig& rig);

/// Camera indices n with |n - s| <= radius, clamped to [1, N_V]. Never empty.
ViewRange ball_view_range(const NavigationBall& ball, std::size_t view_count);

/// Cameras that are the nearest camera of at least one viewpoint inside the ball,
/// i.e. the union of the rendering cells the ball touches.
ViewRange ball_reference_range(const NavigationBall& ball, std::size_t view_count);

// ---------------------------------------------------------------------------
// View popularity

enum class PopularityKind { uniform, center, right, custom };

PopularityKind parse_popularity_kind(const std::string& name);
std::string to_string(PopularityKind kind);

struct GaussianShape {
    double mean_fraction = 0.5;
    double stddev_fraction = 1.0 / 6.0;
};

GaussianShape default_shape(PopularityKind kind);

/// Probability of each camera being the rendering reference. Sums to 1.
class Popularity {
public:
    /// Normalizes `weights`; rejects negative entries or zero total mass.
    static Popularity from_weights(std::vector<double> weights);
    static Popularity uniform(std::size_t view_count);

    /// Discretized Gaussian over indices 1..N_V. The mean sits at
    /// 1 + mean_fraction * (N_V - 1), the deviation is stddev_fraction * N_V.
    static Popularity gaussian(std::size_t view_count, GaussianShape shape);

    static Popularity make(PopularityKind kind, std::size_t view_count, GaussianShape shape);

    /// CSV `index,p`. Renormalized when the sum is within 1% of one, rejected otherwise.
    static Popularity load_csv(const std::filesystem::path& path);
    void save_csv(const std::filesystem::path& path) const;

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t index) const { return p_[index - 1]; }
    std::span<const double> values() const { return p_; }

    /// Sum of p_n over an inclusive index range.
    double mass(ViewRange range) const;

private:
    explicit Popularity(std::vector<double> p);

    std::vector<double> p_;
    std::vector<double> prefix_;
};

}  // namespace navseg
