#include "identik/degrade.hpp"

#include <algorithm>
#include <cmath>

namespace identik {

std::vector<double> gaussian_kernel(const BlurSpec& spec) {
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    int radius = spec.effective_radius();
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int x = -radius; x <= radius; ++x) {
        double w = std::exp(-(static_cast<double>(x) * x) / (2.0 * spec.sigma * spec.sigma));
        k[x + radius] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

namespace {

std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
}

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

RasterImage gaussian_blur(const RasterImage& img, const BlurSpec& spec) {
    if (!img.valid()) throw BadDimensions("gaussian_blur: invalid image");
    auto kernel = gaussian_kernel(spec);
    int radius = spec.effective_radius();
    const int w = img.width, h = img.height, ch = img.channels;

    // Horizontal pass kept in double so rounding happens once, after the
    // vertical pass.
    std::vector<double> tmp(static_cast<std::size_t>(w) * h * ch);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int xi = clampi(x + k, 0, w - 1);
                    acc += kernel[k + radius] * img.at(xi, y, c);
                }
                tmp[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
            }
        }
    }

    RasterImage out{w, h, ch, std::vector<std::uint8_t>(img.pixels.size())};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int yi = clampi(y + k, 0, h - 1);
                    acc += kernel[k + radius] *
                           tmp[(static_cast<std::size_t>(yi) * w + x) * ch + c];
                }
                out.pixels[(static_cast<std::size_t>(y) * w + x) * ch + c] = to_u8(acc);
            }
        }
    }
    return out;
}

namespace {

// Catmull-Rom cubic kernel, a = -0.5.
double cubic_weight(double d) {
    constexpr double a = -0.5;
    d = std::abs(d);
    if (d <= 1.0) return ((a + 2.0) * d - (a + 3.0)) * d * d + 1.0;
    if (d < 2.0) return a * (((d - 5.0) * d + 8.0) * d - 4.0);
    return 0.0;
}

}  // namespace

RasterImage bicubic_resize(const RasterImage& img, int out_w, int out_h) {
    if (!img.valid()) throw BadDimensions("bicubic_resize: invalid image");
    if (out_w < 1 || out_h < 1) throw BadDimensions("bicubic_resize: bad output dims");

    const int w = img.width, h = img.height, ch = img.channels;
    const double sx = static_cast<double>(w) / out_w;
    const double sy = static_cast<double>(h) / out_h;

    RasterImage out{out_w, out_h, ch,
                    std::vector<std::uint8_t>(static_cast<std::size_t>(out_w) * out_h * ch)};

    for (int oy = 0; oy < out_h; ++oy) {
        double src_y = (oy + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(src_y));
        double ty = src_y - y0;
        double wy[4];
        for (int j = 0; j < 4; ++j) wy[j] = cubic_weight(ty - (j - 1));

        for (int ox = 0; ox < out_w; ++ox) {
            double src_x = (ox + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(src_x));
            double tx = src_x - x0;
            double wx[4];
            for (int i = 0; i < 4; ++i) wx[i] = cubic_weight(tx - (i - 1));

            for (int c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int j = 0; j < 4; ++j) {
                    int yi = clampi(y0 + j - 1, 0, h - 1);
                    double row = 0.0;
                    for (int i = 0; i < 4; ++i) {
                        int xi = clampi(x0 + i - 1, 0, w - 1);
                        row += wx[i] * img.at(xi, yi, c);
                    }
                    acc += wy[j] * row;
                }
                out.pixels[(static_cast<std::size_t>(oy) * out_w + ox) * ch + c] =
                    to_u8(acc);
            }
        }
    }
    return out;
}

std::vector<std::pair<std::string, RasterImage>> degradation_ladder(
    const RasterImage& img, LadderKind kind) {
    std::vector<std::pair<std::string, RasterImage>> out;
    if (kind == LadderKind::Blur) {
        for (int sigma = 1; sigma <= 5; ++sigma)
            out.emplace_back("sigma" + std::to_string(sigma),
                             gaussian_blur(img, {static_cast<double>(sigma), 0}));
    } else {
        if (img.width != 224 || img.height != 224)
            throw BadDimensions("resolution ladder requires a 224x224 input");
        for (int side : {84, 56, 42, 28}) {
            RasterImage down = bicubic_resize(img, side, side);
            out.emplace_back("res" + std::to_string(side),
                             bicubic_resize(down, 112, 112));
        }
    }
    return out;
}

}  // namespace identik
