#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mamp/channel.hpp"
#include "mamp/modem.hpp"
#include "mamp/rng.hpp"

namespace mamp {

/// One transmission Y = A X + N. X is n x slots, filled column-major from `bits`.
struct Frame {
    std::vector<std::uint8_t> bits;
    CMatrix x;
    CMatrix y;
};

/// Entrywise CN(0, sigma2) noise.
CMatrix awgn(std::size_t rows, std::size_t cols, double sigma2, Rng& rng);

/// Maps `bits` onto the constellation and passes them through the channel.
Frame transmit(const ChannelMatrix& a, const Constellation& c, std::span<const std::uint8_t> bits, std::size_t slots,
               double sigma2, Rng& rng);

/// Uniform random bits (or CN(0,1) symbols for the Gaussian input).
Frame random_frame(const ChannelMatrix& a, const Constellation& c, std::size_t slots, double sigma2, Rng& rng);

} // namespace mamp
