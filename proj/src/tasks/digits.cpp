#include "nesy/tasks/digits.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace nesy::tasks {

namespace {

// 5x7 glyphs, one string of 35 cells per digit.
constexpr const char* kGlyphs[10] = {
        ".###."
        "#...#"
        "#..##"
        "#.#.#"
        "##..#"
        "#...#"
        ".###.",
        "..#.."
        ".##.."
        "..#.."
        "..#.."
        "..#.."
        "..#.."
        ".###.",
        ".###."
        "#...#"
        "....#"
        "...#."
        "..#.."
        ".#..."
        "#####",
        "#####"
        "...#."
        "..#.."
        "...#."
        "....#"
        "#...#"
        ".###.",
        "...#."
        "..##."
        ".#.#."
        "#..#."
        "#####"
        "...#."
        "...#.",
        "#####"
        "#...."
        "####."
        "....#"
        "....#"
        "#...#"
        ".###.",
        "..##."
        ".#..."
        "#...."
        "####."
        "#...#"
        "#...#"
        ".###.",
        "#####"
        "....#"
        "...#."
        "..#.."
        ".#..."
        ".#..."
        ".#...",
        ".###."
        "#...#"
        "#...#"
        ".###."
        "#...#"
        "#...#"
        ".###.",
        ".###."
        "#...#"
        "#...#"
        ".####"
        "....#"
        "...#."
        ".##..",
};

constexpr int kScale = 3;

}  // namespace

std::vector<double> DigitSet::image(std::size_t i) const {
    std::vector<double> out(kDigitPixels);
    for (std::size_t p = 0; p < kDigitPixels; ++p) {
        out[p] = pixels[i * kDigitPixels + p] / 255.0;
    }
    return out;
}

DigitSet gen_synthetic_digits(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    DigitSet out;
    for (std::size_t i = 0; i < count; ++i) {
        out.labels.push_back(static_cast<int>(i % 10));
    }
    std::shuffle(out.labels.begin(), out.labels.end(), rng);
    out.pixels.assign(count * kDigitPixels, 0);

    std::normal_distribution<double> noise(0.0, 0.12);
    std::uniform_real_distribution<double> ink(0.65, 1.0);
    std::uniform_int_distribution<int> shiftX(-2, 2);
    std::uniform_int_distribution<int> shiftY(-2, 2);
    std::bernoulli_distribution thick(0.5);
    const int w = 5 * kScale;
    const int h = 7 * kScale;
    for (std::size_t i = 0; i < count; ++i) {
        const char* glyph = kGlyphs[out.labels[i]];
        int ox = (static_cast<int>(kDigitSide) - w) / 2 + shiftX(rng);
        int oy = (static_cast<int>(kDigitSide) - h) / 2 + shiftY(rng);
        double level = ink(rng);
        bool bold = thick(rng);
        std::vector<double> img(kDigitPixels, 0.0);
        for (int gy = 0; gy < 7; ++gy) {
            for (int gx = 0; gx < 5; ++gx) {
                if (glyph[gy * 5 + gx] != '#') {
                    continue;
                }
                for (int dy = 0; dy < kScale; ++dy) {
                    for (int dx = 0; dx < kScale + (bold ? 1 : 0); ++dx) {
                        int x = ox + gx * kScale + dx;
                        int y = oy + gy * kScale + dy;
                        if (x >= 0 && y >= 0 && x < static_cast<int>(kDigitSide) && y < static_cast<int>(kDigitSide)) {
                            img[static_cast<std::size_t>(y) * kDigitSide + static_cast<std::size_t>(x)] = level;
                        }
                    }
                }
            }
        }
        for (std::size_t p = 0; p < kDigitPixels; ++p) {
            double v = std::clamp(img[p] + noise(rng), 0.0, 1.0);
            out.pixels[i * kDigitPixels + p] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    }
    return out;
}

}  // namespace nesy::tasks
