#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "hyrec/numerics/tensor.hpp"

namespace hyrec::num {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Uniform [0, 1) from a 64-bit hash.
inline constexpr double unit_real(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Counter-based dropout randomness: each call to next() opens a fresh
/// sub-stream, and element i of that call draws hash(seed, call, i).
class DropoutStream {
public:
    explicit DropoutStream(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t next() { return splitmix64(seed_ ^ splitmix64(++counter_)); }
    std::uint64_t counter() const { return counter_; }
    void reset(std::uint64_t seed) {
        seed_ = seed;
        counter_ = 0;
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// Fills with uniform(-bound, bound) from a portable generator.
template <class T>
void fill_uniform(Tensor<T>& t, double bound, std::mt19937_64& rng) {
    for (auto& v : t.data()) v = static_cast<T>((unit_real(rng()) * 2.0 - 1.0) * bound);
}

template <class T>
Tensor<T> uniform_tensor(Shape shape, double bound, std::mt19937_64& rng) {
    Tensor<T> t(std::move(shape));
    fill_uniform(t, bound, rng);
    return t;
}

}  // namespace hyrec::num
