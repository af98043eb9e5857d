#include "rbelast/param.hpp"

#include "rbelast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rbe {

Param ParamBox::centroid() const
{
    Param c(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
}

bool ParamBox::contains(std::span<const double> mu, double tol) const
{
    if (mu.size() != dim())
        return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double slack = tol * std::max(hi[i] - lo[i], 1e-300);
        if (!(mu[i] >= lo[i] - slack && mu[i] <= hi[i] + slack))
            return false;
    }
    return true;
}

double ParamBox::scaled_distance(std::span<const double> a, std::span<const double> b) const
{
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double w = hi[i] > lo[i] ? hi[i] - lo[i] : 1.0;
        const double d = (a[i] - b[i]) / w;
        d2 += d * d;
    }
    return std::sqrt(d2);
}

void ParamBox::require(std::span<const double> mu) const
{
    if (contains(mu))
        return;
    std::ostringstream os;
    os << "mu = (";
    for (std::size_t i = 0; i < mu.size(); ++i)
        os << (i ? ", " : "") << mu[i];
    os << ") is outside the parameter box";
    if (mu.size() != dim())
        os << " (expected " << dim() << " components)";
    throw OutOfDomain(os.str());
}

std::vector<Param> uniform_sample(const ParamBox& box, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Param> out(n, Param(box.dim()));
    for (auto& mu : out)
        for (std::size_t i = 0; i < box.dim(); ++i)
            mu[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * u(rng);
    return out;
}

std::vector<Param> log_uniform_sample(const ParamBox& box, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Param> out(n, Param(box.dim()));
    for (auto& mu : out)
        for (std::size_t i = 0; i < box.dim(); ++i) {
            const double t = u(rng);
            if (box.lo[i] > 0.0)
                mu[i] = std::clamp(box.lo[i] * std::pow(box.hi[i] / box.lo[i], t), box.lo[i], box.hi[i]);
            else
                mu[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * t;
        }
    return out;
}

std::vector<Param> box_vertices(const ParamBox& box)
{
    std::vector<Param> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << box.dim()); ++mask) {
        Param mu(box.dim());
        for (std::size_t i = 0; i < box.dim(); ++i)
            mu[i] = (mask >> i) & 1U ? box.hi[i] : box.lo[i];
        out.push_back(mu);
    }
    return out;
}

} // namespace rbe
