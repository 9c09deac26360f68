#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace identik {

struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 or 3
    std::vector<std::uint8_t> pixels;  // row-major, interleaved channels

    bool valid() const {
        return width > 0 && height > 0 && (channels == 1 || channels == 3) &&
               pixels.size() == static_cast<std::size_t>(width) * height * channels;
    }

    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

struct BadDimensions : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BlurSpec {
    double sigma = 1.0;
    int kernel_radius = 0;  // 0 -> ceil(3 * sigma)

    int effective_radius() const {
        return kernel_radius > 0 ? kernel_radius
                                 : static_cast<int>(std::ceil(3.0 * sigma));
    }
};

// Sampled Gaussian kernel exp(-x^2 / 2 sigma^2), x in [-radius, radius],
// renormalized to unit sum.
std::vector<double> gaussian_kernel(const BlurSpec& spec);

// Separable convolution (horizontal then vertical), edge replication at
// borders, channels independent. Output dimensions equal input.
RasterImage gaussian_blur(const RasterImage& img, const BlurSpec& spec);

// Catmull-Rom bicubic (a = -0.5), half-pixel-center mapping, edge
// replication, samples clamped to [0, 255].
RasterImage bicubic_resize(const RasterImage& img, int out_w, int out_h);

enum class LadderKind { Blur, Resolution };

// Blur: five outputs at sigma 1..5, tags "sigma1".."sigma5".
// Resolution: input must be 224x224; downscale to 84/56/42/28 squared, then
// upscale to the 112x112 matcher input, tags "res84".."res28".
std::vector<std::pair<std::string, RasterImage>> degradation_ladder(
    const RasterImage& img, LadderKind kind);

// Lossless PNG I/O (8-bit gray or RGB).
RasterImage read_png(const std::filesystem::path& path);
void write_png(const RasterImage& img, const std::filesystem::path& path);

}  // namespace identik
