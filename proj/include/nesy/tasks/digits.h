#pragma once

#include <cstdint>
#include <vector>

namespace nesy::tasks {

inline constexpr std::size_t kDigitSide = 28;
inline constexpr std::size_t kDigitPixels = kDigitSide * kDigitSide;

/** Labeled 28x28 grayscale digits, row-major bytes. */
struct DigitSet {
    std::vector<std::uint8_t> pixels;
    std::vector<int> labels;

    std::size_t size() const {
        return labels.size();
    }
    /** Image i scaled to [0,1]. */
    std::vector<double> image(std::size_t i) const;
};

/**
 * Ten 5x7 glyph templates, scaled 3x, shifted, thickened at random and
 * covered with Gaussian noise. Class counts differ by at most one and the
 * output is a pure function of (seed, count).
 */
DigitSet gen_synthetic_digits(std::uint64_t seed, std::size_t count);

}  // namespace nesy::tasks
