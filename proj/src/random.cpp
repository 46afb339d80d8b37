#include "extentlab/random.hpp"

#include <cmath>
#include <numbers>

namespace extentlab
{

namespace
{
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x)
{
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t RandomStream::next_u64()
{
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double RandomStream::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal()
{
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RandomStream RandomStream::split(std::uint64_t id, std::uint64_t index) const
{
    return RandomStream(mix64(mix64(key_ ^ mix64(id + kGamma)) + index * kGamma + 1));
}

RandomStream trial_stream(std::uint64_t master_seed, std::uint64_t experiment_id, std::uint64_t trial)
{
    return RandomStream(mix64(master_seed)).split(experiment_id, trial);
}

ComplexVector haar_sample(Index dimension, RandomStream &stream)
{
    if (dimension < 1)
        throw DimensionError("Haar sample needs dimension >= 1");
    ComplexVector psi(dimension);
    for (;;)
    {
        for (Index j = 0; j < dimension; ++j)
        {
            const double re = stream.normal();
            psi(j) = Complex(re, stream.normal());
        }
        const double norm = psi.norm();
        if (norm > 0)
            return psi / norm;
    }
}

} // namespace extentlab
