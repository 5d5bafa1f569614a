#include <doctest.h>

#include <cmath>
#include <random>

#include "pgc/codegen.hpp"
#include "pgc/error.hpp"
#include "support.hpp"

using namespace pgc;

namespace {

// Smallest k with P[X <= k] > tail and largest k with P[X >= k] > tail for
// X ~ Binomial(n, 1/2), evaluated from log-pmf sums in long double.
std::pair<std::size_t, std::size_t> binomial_central_interval(std::size_t n, long double tail) {
    std::vector<long double> pmf(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const long double lg = std::lgamma(static_cast<long double>(n) + 1) -
                               std::lgamma(static_cast<long double>(k) + 1) -
                               std::lgamma(static_cast<long double>(n - k) + 1);
        pmf[k] = std::exp(lg - static_cast<long double>(n) * std::log(2.0L));
    }
    long double cdf = 0;
    std::size_t lo = 0;
    for (; lo <= n; ++lo) {
        cdf += pmf[lo];
        if (cdf > tail) break;
    }
    long double sf = 0;
    std::size_t hi = n;
    for (;; --hi) {
        sf += pmf[hi];
        if (sf > tail) break;
    }
    return {lo, hi};
}

} // namespace

TEST_CASE("generate_module_matrix is deterministic and sized") {
    const auto a = generate_module_matrix(7, 64, 64);
    const auto b = generate_module_matrix(7, 64, 64);
    CHECK(a.size() == 4096);
    CHECK(a == b);
    CHECK(generate_module_matrix(8, 64, 64) != a);
    for (auto bit : a.bits) CHECK((bit == 0 || bit == 1));

    const auto one = generate_module_matrix(7, 1, 1);
    REQUIRE(one.size() == 1);
    CHECK((one.bits[0] == 0 || one.bits[0] == 1));

    CHECK_THROWS_AS(generate_module_matrix(7, 0, 3), ParameterError);
}

TEST_CASE("generated bits are balanced within the binomial interval") {
    const auto [lo, hi] = binomial_central_interval(4096, 0.5e-4L);
    // The exact 99.99% interval is well inside the stated [0.45, 0.55] band.
    CHECK(static_cast<double>(lo) / 4096 >= 0.45);
    CHECK(static_cast<double>(hi) / 4096 <= 0.55);

    const auto m = generate_module_matrix(7, 64, 64);
    std::size_t ones = 0;
    for (auto b : m.bits) ones += b;
    CHECK(ones >= lo);
    CHECK(ones <= hi);
    const double mean = static_cast<double>(ones) / 4096.0;
    CHECK(mean >= 0.45);
    CHECK(mean <= 0.55);
}

TEST_CASE("render expands modules into squares") {
    const auto big = render(generate_module_matrix(3, 64, 64), 6);
    CHECK(big.height == 384);
    CHECK(big.width == 384);
    CHECK(big.domain == PixelDomain::binary01);

    const auto blank = render(ModuleMatrix(2, 2), 3);
    CHECK(blank.height == 6);
    for (float v : blank.values) CHECK(v == 0.0f);

    ModuleMatrix m(2, 2);
    m.at(0, 0) = 1;
    const auto img = render(m, 2);
    std::size_t dark = 0;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const bool expect = r < 2 && c < 2;
            CHECK((img.at(r, c) == 1.0f) == expect);
            dark += img.at(r, c) == 1.0f;
        }
    }
    CHECK(dark == 4);
}

TEST_CASE("split_blocks orders blocks row-major") {
    const auto big = split_blocks(render(generate_module_matrix(3, 64, 64), 6), 24);
    CHECK(big.blocks.size() == 256);
    CHECK(big.grid_rows * big.grid_cols == 256);
    for (const auto& b : big.blocks) CHECK(b.size() == 576);

    std::mt19937_64 rng(1);
    const auto single = test::random_image(rng, 24, 24, PixelDomain::unit_interval);
    const auto s = split_blocks(single, 24);
    REQUIRE(s.blocks.size() == 1);
    CHECK(s.blocks[0] == single.values);

    const auto tall = test::random_image(rng, 48, 24, PixelDomain::unit_interval);
    const auto t = split_blocks(tall, 24);
    REQUIRE(t.blocks.size() == 2);
    CHECK(std::equal(t.blocks[0].begin(), t.blocks[0].end(), tall.values.begin()));
    CHECK(std::equal(t.blocks[1].begin(), t.blocks[1].end(), tall.values.begin() + 576));

    CHECK_THROWS_AS(split_blocks(test::random_image(rng, 25, 24, PixelDomain::binary01), 24),
                    DimensionError);
}

TEST_CASE("assemble_blocks inverts split_blocks") {
    std::mt19937_64 rng(2);
    const auto img = test::random_image(rng, 384, 384, PixelDomain::unit_interval);
    CHECK(assemble_blocks(split_blocks(img, 24)) == img);

    BlockSet one;
    one.block_px = 24;
    one.grid_rows = one.grid_cols = 1;
    one.blocks.push_back(test::random_image(rng, 24, 24, PixelDomain::unit_interval).values);
    const auto back = assemble_blocks(one);
    CHECK(back.height == 24);
    CHECK(back.values == one.blocks[0]);

    BlockSet many;
    many.block_px = 24;
    many.grid_rows = many.grid_cols = 16;
    for (int i = 0; i < 256; ++i) {
        many.blocks.push_back(test::random_image(rng, 24, 24, PixelDomain::unit_interval).values);
    }
    CHECK(split_blocks(assemble_blocks(many), 24) == many);

    BlockSet bad = many;
    bad.blocks.pop_back();
    CHECK_THROWS_AS(assemble_blocks(bad), DimensionError);
    bad = many;
    bad.blocks[3].resize(10);
    CHECK_THROWS_AS(assemble_blocks(bad), DimensionError);
}

TEST_CASE("property: split and assemble round trip for divisible sizes") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t block = 1 + rng() % 8;
        const std::size_t h = block * (1 + rng() % 6);
        const std::size_t w = block * (1 + rng() % 6);
        const auto d = static_cast<PixelDomain>(rng() % 3);
        const auto img = test::random_image(rng, h, w, d);
        const auto bs = split_blocks(img, block);
        CHECK(bs.blocks.size() == (h / block) * (w / block));
        CHECK(assemble_blocks(bs) == img);
        CHECK(split_blocks(assemble_blocks(bs), block) == bs);
    }
}

TEST_CASE("binarize tie and polarity rules") {
    const std::vector<float> v{0.2f, 0.8f};
    CHECK(binarize(v, 0.5, Polarity::high_is_one) == std::vector<std::uint8_t>{0, 1});
    CHECK(binarize(std::vector<float>{0.5f}, 0.5, Polarity::high_is_one) == std::vector<std::uint8_t>{1});
    CHECK(binarize(v, 0.5, Polarity::low_is_one) == std::vector<std::uint8_t>{1, 0});
    CHECK_THROWS_AS(binarize(v, 1.5, Polarity::high_is_one), ParameterError);
    CHECK_THROWS_AS(binarize(v, -0.01, Polarity::high_is_one), ParameterError);

    PixelImage bytes(1, 2, PixelDomain::byte0_255, 100.0f);
    CHECK_THROWS_AS(binarize(bytes, 0.5, Polarity::high_is_one), DomainError);
}

TEST_CASE("property: binarize is idempotent on its own output") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto img = test::random_image(rng, 8, 8, PixelDomain::unit_interval);
        const double t = static_cast<double>(rng() % 101) / 100.0;
        const auto once = binarize(img, t, Polarity::high_is_one);
        // Any threshold in (0, 1] separates 0 from 1.
        const double t2 = t == 0.0 ? 0.5 : t;
        CHECK(binarize(once, t2, Polarity::high_is_one) == once);
    }
}

TEST_CASE("modules_from_pixels majority vote") {
    PixelImage three(2, 2, PixelDomain::binary01);
    three.values = {1, 1, 1, 0};
    CHECK(modules_from_pixels(three, 2).bits == std::vector<std::uint8_t>{1});

    PixelImage two(2, 2, PixelDomain::binary01);
    two.values = {1, 0, 0, 1};
    CHECK(modules_from_pixels(two, 2).bits == std::vector<std::uint8_t>{0});

    CHECK_THROWS_AS(modules_from_pixels(PixelImage(3, 2, PixelDomain::binary01), 2), DimensionError);
    CHECK_THROWS_AS(modules_from_pixels(PixelImage(2, 2, PixelDomain::unit_interval), 2), DomainError);
}

TEST_CASE("property: modules_from_pixels inverts render") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 1 + rng() % 12;
        const std::size_t cols = 1 + rng() % 12;
        const std::size_t k = 1 + rng() % 7;
        const auto m = test::random_matrix(rng, rows, cols);
        CHECK(modules_from_pixels(render(m, k), k) == m);
    }
}

TEST_CASE("check_image and ink_intensity") {
    PixelImage ok(2, 2, PixelDomain::unit_interval, 0.3f);
    CHECK_NOTHROW(check_image(ok));
    ok.values[1] = 1.2f;
    CHECK_THROWS_AS(check_image(ok), DomainError);
    PixelImage wrong(2, 2, PixelDomain::binary01);
    wrong.values.pop_back();
    CHECK_THROWS_AS(check_image(wrong), DimensionError);
    PixelImage half(1, 1, PixelDomain::binary01, 0.5f);
    CHECK_THROWS_AS(check_image(half), DomainError);

    PixelImage scan(1, 3, PixelDomain::byte0_255);
    scan.values = {0.0f, 255.0f, 51.0f};
    const auto ink = ink_intensity(scan);
    CHECK(ink.domain == PixelDomain::unit_interval);
    CHECK(ink.values[0] == 1.0f);
    CHECK(ink.values[1] == 0.0f);
    CHECK(ink.values[2] == doctest::Approx(0.8).epsilon(1e-6));
    CHECK_THROWS_AS(ink_intensity(ok), DomainError);
}

TEST_CASE("geometry validation") {
    Geometry g;
    CHECK(g.image_px() == 384);
    CHECK(g.block_dim() == 576);
    CHECK(g.blocks_per_image() == 256);
    CHECK_NOTHROW(g.validate());
    g.block_px = 25;
    CHECK_THROWS_AS(g.validate(), ParameterError);
    g = Geometry{};
    g.modules = 0;
    CHECK_THROWS_AS(g.validate(), ParameterError);
}
