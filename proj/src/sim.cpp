#include "mamp/sim.hpp"

#include <stdexcept>

namespace mamp {

CMatrix awgn(std::size_t rows, std::size_t cols, double sigma2, Rng& rng) {
    ComplexNormal cn(sigma2);
    CMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out.data()[i] = cn(rng);
    }
    return out;
}

Frame transmit(const ChannelMatrix& a, const Constellation& c, std::span<const std::uint8_t> bits, std::size_t slots,
               double sigma2, Rng& rng) {
    const std::size_t symbols = a.n() * slots;
    if (bits.size() != symbols * static_cast<std::size_t>(c.bits_per_symbol())) {
        throw std::invalid_argument("transmit: bit count does not fill the frame");
    }
    Frame f;
    f.bits.assign(bits.begin(), bits.end());
    const auto sym = modulate(bits, c);
    f.x = Eigen::Map<const CMatrix>(sym.data(), static_cast<Eigen::Index>(a.n()), static_cast<Eigen::Index>(slots));
    f.y = a.dense() * f.x + awgn(a.m(), slots, sigma2, rng);
    return f;
}

Frame random_frame(const ChannelMatrix& a, const Constellation& c, std::size_t slots, double sigma2, Rng& rng) {
    if (!c.is_discrete()) {
        Frame f;
        f.x = awgn(a.n(), slots, 1.0, rng);
        f.y = a.dense() * f.x + awgn(a.m(), slots, sigma2, rng);
        return f;
    }
    std::vector<std::uint8_t> bits(a.n() * slots * static_cast<std::size_t>(c.bits_per_symbol()));
    std::bernoulli_distribution coin(0.5);
    for (auto& b : bits) {
        b = coin(rng) ? 1 : 0;
    }
    return transmit(a, c, bits, slots, sigma2, rng);
}

} // namespace mamp
