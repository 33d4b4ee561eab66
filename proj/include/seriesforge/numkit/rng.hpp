#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace seriesforge::numkit {

// Seeded 64-bit Mersenne Twister with a draw counter. Doubles are formed
// from the top 53 bits so the stream is identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    std::uint64_t next_u64() {
        ++draws_;
        return engine_();
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    // Uniform integer in [0, n); n > 0.
    std::size_t below(std::size_t n);

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t draws() const noexcept { return draws_; }

    // Round-trippable text form of the full engine state.
    std::string state() const;
    static Rng from_state(const std::string& state);

    friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_ && a.draws_ == b.draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
};

}  // namespace seriesforge::numkit
