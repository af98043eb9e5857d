#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rbe {

using Param = std::vector<double>;

/// Axis-aligned parameter box D = [lo_1,hi_1] x ... x [lo_P,hi_P].
struct ParamBox {
    std::vector<double> lo, hi;

    std::size_t dim() const { return lo.size(); }
    Param centroid() const;
    /// Relative slack `tol` per component, scaled by the box width.
    bool contains(std::span<const double> mu, double tol = 1e-12) const;
    /// Distance in coordinates normalized by the box widths.
    double scaled_distance(std::span<const double> a, std::span<const double> b) const;
    /// Throws OutOfDomain with a readable message.
    void require(std::span<const double> mu) const;
};

/// Uniform random sample of the box; deterministic for a given seed.
std::vector<Param> uniform_sample(const ParamBox& box, std::size_t n, std::uint64_t seed);

/// Like uniform_sample, but log-uniform in every component whose range is strictly positive.
std::vector<Param> log_uniform_sample(const ParamBox& box, std::size_t n, std::uint64_t seed);

/// The 2^P corners of the box.
std::vector<Param> box_vertices(const ParamBox& box);

} // namespace rbe
