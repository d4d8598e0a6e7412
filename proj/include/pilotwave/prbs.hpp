#pragma once

#include <cstdint>
#include <stdexcept>

#include "pilotwave/signal.hpp"

namespace pilotwave {

/// Fibonacci LFSR for the standard maximal-length PRBS polynomials:
/// PRBS7  x^7 + x^6 + 1, PRBS15 x^15 + x^14 + 1, PRBS31 x^31 + x^28 + 1.
class PrbsGenerator {
public:
    PrbsGenerator(int order, uint64_t seed) : order_(order) {
        int tap2;
        switch (order) {
            case 7: tap2 = 6; break;
            case 15: tap2 = 14; break;
            case 31: tap2 = 28; break;
            default:
                throw std::invalid_argument("prbs: order must be 7, 15 or 31");
        }
        mask_ = (uint64_t{1} << order) - 1;
        if (seed == 0)
            throw std::invalid_argument("prbs: zero seed locks the LFSR at all-zeros");
        if (seed > mask_)
            throw std::invalid_argument("prbs: seed does not fit in `order` bits");
        state_ = seed;
        tap1_shift_ = order - 1;
        tap2_shift_ = tap2 - 1;
    }

    uint8_t next() {
        const uint8_t out = static_cast<uint8_t>((state_ >> tap1_shift_) & 1u);
        const uint64_t fb = ((state_ >> tap1_shift_) ^ (state_ >> tap2_shift_)) & 1u;
        state_ = ((state_ << 1) | fb) & mask_;
        return out;
    }

private:
    int order_;
    uint64_t mask_;
    uint64_t state_;
    int tap1_shift_;
    int tap2_shift_;
};

inline BitSeq prbs_generate(int order, uint64_t seed, std::size_t n) {
    if (n < 1) throw std::invalid_argument("prbs: n must be >= 1");
    PrbsGenerator gen(order, seed);
    BitSeq bits(n);
    for (auto& b : bits) b = gen.next();
    return bits;
}

}  // namespace pilotwave
