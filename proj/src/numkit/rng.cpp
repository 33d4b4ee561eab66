#include "seriesforge/numkit/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "seriesforge/error.hpp"

namespace seriesforge::numkit {

double Rng::normal() {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw ContractError("Rng::below: empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

std::string Rng::state() const {
    std::ostringstream os;
    os << seed_ << ' ' << draws_ << ' ' << engine_;
    return os.str();
}

Rng Rng::from_state(const std::string& state) {
    std::istringstream is(state);
    Rng rng;
    is >> rng.seed_ >> rng.draws_ >> rng.engine_;
    if (!is) throw FormatError("Rng: malformed state string");
    return rng;
}

}  // namespace seriesforge::numkit
