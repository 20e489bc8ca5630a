#include "scdnn/rng.hpp"

namespace scdnn {

namespace {

// Maximal-length tap positions (1-based, including the width itself).
// Positions follow the classic XAPP052 table; each polynomial yields a
// full 2^w - 1 period.
struct TapEntry {
    unsigned width;
    unsigned taps[4];
};

constexpr TapEntry kTaps[] = {
    {3, {3, 2, 0, 0}},    {4, {4, 3, 0, 0}},     {5, {5, 3, 0, 0}},
    {6, {6, 5, 0, 0}},    {7, {7, 6, 0, 0}},     {8, {8, 6, 5, 4}},
    {9, {9, 5, 0, 0}},    {10, {10, 7, 0, 0}},   {11, {11, 9, 0, 0}},
    {12, {12, 6, 4, 1}},  {13, {13, 4, 3, 1}},   {14, {14, 5, 3, 1}},
    {15, {15, 14, 0, 0}}, {16, {16, 15, 13, 4}}, {17, {17, 14, 0, 0}},
    {18, {18, 11, 0, 0}}, {19, {19, 6, 2, 1}},   {20, {20, 17, 0, 0}},
    {21, {21, 19, 0, 0}}, {22, {22, 21, 0, 0}},  {23, {23, 18, 0, 0}},
    {24, {24, 23, 22, 17}}, {25, {25, 22, 0, 0}}, {26, {26, 6, 2, 1}},
    {27, {27, 5, 2, 1}},  {28, {28, 25, 0, 0}},  {29, {29, 27, 0, 0}},
    {30, {30, 6, 4, 1}},  {31, {31, 28, 0, 0}},  {32, {32, 22, 2, 1}},
};

std::uint32_t taps_mask_for(unsigned width) {
    for (const auto& e : kTaps) {
        if (e.width == width) {
            std::uint32_t mask = 0;
            for (unsigned t : e.taps)
                if (t != 0) mask |= 1u << (t - 1);
            return mask;
        }
    }
    throw std::invalid_argument("lfsr_width must be in [3, 32], got " + std::to_string(width));
}

}  // namespace

Lfsr::Lfsr(unsigned width, std::uint64_t seed)
    : width_(width),
      mask_(width >= 32 ? 0xFFFFFFFFu : ((1u << width) - 1u)),
      taps_(taps_mask_for(width)) {
    // Map the seed onto a nonzero state; zero is the lone fixed point.
    state_ = static_cast<std::uint32_t>(mix64(seed) % mask_) + 1u;
}

}  // namespace scdnn
