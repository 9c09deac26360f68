#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <random>

#include "identik/degrade.hpp"
#include "oracles.hpp"

using namespace identik;

namespace {

RasterImage constant_image(int w, int h, int ch, std::uint8_t v) {
    return {w, h, ch, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * ch, v)};
}

RasterImage random_image(int w, int h, int ch, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    RasterImage img{w, h, ch, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * ch)};
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(gen() & 0xff);
    return img;
}

int max_abs_diff(const RasterImage& a, const RasterImage& b) {
    REQUIRE(a.pixels.size() == b.pixels.size());
    int m = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
        m = std::max(m, std::abs(static_cast<int>(a.pixels[i]) - b.pixels[i]));
    return m;
}

}  // namespace

TEST_CASE("gaussian kernel sums to one") {
    for (double sigma : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        auto k = gaussian_kernel({sigma, 0});
        CHECK(k.size() == 2 * static_cast<std::size_t>(std::ceil(3 * sigma)) + 1);
        double sum = 0;
        for (double w : k) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("blur of a constant image is the constant image") {
    auto img = constant_image(32, 24, 3, 137);
    auto out = gaussian_blur(img, {2.0, 0});
    CHECK(out.pixels == img.pixels);
}

TEST_CASE("blurred impulse equals the outer-product kernel") {
    RasterImage img = constant_image(41, 41, 1, 0);
    img.pixels[20 * 41 + 20] = 255;
    BlurSpec spec{3.0, 0};
    auto out = gaussian_blur(img, spec);
    auto kernel = gaussian_kernel(spec);
    int radius = spec.effective_radius();
    for (int y = 0; y < 41; ++y) {
        for (int x = 0; x < 41; ++x) {
            int ky = y - 20, kx = x - 20;
            double expected = 0.0;
            if (std::abs(ky) <= radius && std::abs(kx) <= radius)
                expected = 255.0 * kernel[ky + radius] * kernel[kx + radius];
            CHECK(std::abs(out.at(x, y, 0) - expected) <= 1.0);
        }
    }
}

TEST_CASE("separable blur equals the direct 2-d convolution oracle") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto img = random_image(48, 37, seed == 2 ? 3 : 1, seed);
        for (double sigma : {1.0, 2.5}) {
            auto fast = gaussian_blur(img, {sigma, 0});
            auto ref = oracles::conv2d_ref(img, gaussian_kernel({sigma, 0}));
            CHECK(max_abs_diff(fast, ref) <= 2);
        }
    }
}

TEST_CASE("gaussian semigroup: sigma 3 vs sqrt(5) then 2") {
    // The identity only holds away from the borders: replicated-edge padding
    // applied twice is not the same as padding once with the combined kernel.
    auto img = random_image(64, 64, 1, 99);
    auto direct = gaussian_blur(img, {3.0, 0});
    auto composed = gaussian_blur(gaussian_blur(img, {std::sqrt(5.0), 0}), {2.0, 0});
    int margin = BlurSpec{std::sqrt(5.0), 0}.effective_radius() +
                 BlurSpec{2.0, 0}.effective_radius();
    int m = 0;
    for (int y = margin; y < 64 - margin; ++y)
        for (int x = margin; x < 64 - margin; ++x)
            m = std::max(m, std::abs(static_cast<int>(direct.at(x, y, 0)) -
                                     composed.at(x, y, 0)));
    CHECK(m <= 2);
}

TEST_CASE("blur preserves the mean within one gray level") {
    auto img = random_image(96, 96, 1, 5);
    auto out = gaussian_blur(img, {2.0, 0});
    double m1 = 0, m2 = 0;
    for (auto p : img.pixels) m1 += p;
    for (auto p : out.pixels) m2 += p;
    CHECK(std::abs(m1 - m2) / img.pixels.size() <= 1.0);
}

TEST_CASE("stronger blur does not increase the max horizontal gradient") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto img = random_image(64, 64, 1, seed);
        int prev = 256;
        for (double sigma : {1.0, 2.0, 3.0, 4.0, 5.0}) {
            auto out = gaussian_blur(img, {sigma, 0});
            int g = 0;
            for (int y = 0; y < out.height; ++y)
                for (int x = 1; x < out.width; ++x)
                    g = std::max(g, std::abs(static_cast<int>(out.at(x, y, 0)) -
                                             out.at(x - 1, y, 0)));
            CHECK(g <= prev);
            prev = g;
        }
    }
}

TEST_CASE("bicubic of a constant image is constant") {
    auto img = constant_image(224, 224, 3, 88);
    for (int side : {84, 56, 42, 28}) {
        auto down = bicubic_resize(img, side, side);
        for (auto p : down.pixels) CHECK(p == 88);
        auto up = bicubic_resize(down, 112, 112);
        for (auto p : up.pixels) CHECK(p == 88);
    }
}

TEST_CASE("bicubic at identical dimensions reproduces the input") {
    auto img = random_image(33, 47, 3, 7);
    auto out = bicubic_resize(img, 33, 47);
    CHECK(out.pixels == img.pixels);
}

TEST_CASE("bicubic matches the per-pixel oracle") {
    for (std::uint64_t seed : {21u, 22u}) {
        auto img = random_image(224, 224, 1, seed);
        for (auto [w, h] : {std::pair{112, 112}, {84, 84}, {28, 28}, {300, 150}}) {
            auto fast = bicubic_resize(img, w, h);
            auto ref = oracles::bicubic_ref(img, w, h);
            CHECK(max_abs_diff(fast, ref) <= 1);
        }
    }
    // Impulse downscale, explicitly called out against the oracle.
    RasterImage impulse = constant_image(224, 224, 1, 0);
    impulse.pixels[112 * 224 + 112] = 255;
    CHECK(max_abs_diff(bicubic_resize(impulse, 112, 112),
                       oracles::bicubic_ref(impulse, 112, 112)) <= 1);
}

TEST_CASE("blur ladder yields five same-size images") {
    auto img = random_image(60, 50, 3, 3);
    auto ladder = degradation_ladder(img, LadderKind::Blur);
    REQUIRE(ladder.size() == 5);
    CHECK(ladder[0].first == "sigma1");
    CHECK(ladder[4].first == "sigma5");
    for (auto& [tag, out] : ladder) {
        CHECK(out.width == 60);
        CHECK(out.height == 50);
    }
}

TEST_CASE("resolution ladder yields four 112x112 images from 224x224") {
    auto img = random_image(224, 224, 3, 4);
    auto ladder = degradation_ladder(img, LadderKind::Resolution);
    REQUIRE(ladder.size() == 4);
    CHECK(ladder[0].first == "res84");
    CHECK(ladder[3].first == "res28");
    for (auto& [tag, out] : ladder) {
        CHECK(out.width == 112);
        CHECK(out.height == 112);
    }
    auto bad = random_image(200, 200, 3, 4);
    CHECK_THROWS_AS(degradation_ladder(bad, LadderKind::Resolution), BadDimensions);
}

TEST_CASE("degradation is byte-deterministic") {
    auto img = random_image(100, 80, 3, 55);
    auto a = gaussian_blur(img, {2.0, 0});
    auto b = gaussian_blur(img, {2.0, 0});
    CHECK(a.pixels == b.pixels);
    auto c = bicubic_resize(img, 50, 40);
    auto d = bicubic_resize(img, 50, 40);
    CHECK(c.pixels == d.pixels);
}

TEST_CASE("png round-trip") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "identik_png_test";
    fs::create_directories(dir);
    for (int ch : {1, 3}) {
        auto img = random_image(37, 29, ch, 42 + ch);
        auto p = dir / ("rt" + std::to_string(ch) + ".png");
        write_png(img, p);
        auto back = read_png(p);
        CHECK(back.width == img.width);
        CHECK(back.height == img.height);
        CHECK(back.channels == ch);
        CHECK(back.pixels == img.pixels);
    }
}
