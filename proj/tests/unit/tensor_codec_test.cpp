#include <doctest.h>

#include <cstring>

#include "flexti2v/codec.hpp"
#include "flexti2v/error.hpp"
#include "flexti2v/tensor.hpp"
#include "test_util.hpp"

using namespace flexti2v;
using testutil::error_kind;
using testutil::error_message;

namespace {

Raster random_raster(std::size_t w, std::size_t h, std::uint64_t seed) {
    Raster r(w, h);
    r.data = testutil::normals(r.data.size(), seed);
    return r;
}

bool bit_equal(const Raster& a, const Raster& b) {
    return a.width == b.width && a.height == b.height && a.data.size() == b.data.size() &&
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("latent video frames are contiguous views") {
    const Dims dims{2, 3, 4};
    LatentVideo video(3, dims, 1.0f);
    CHECK(video.size() == 3 * 24);
    video.frame(1)[0] = 5.0f;
    CHECK(video.values()[24] == 5.0f);
    CHECK(video.frame_copy(1).at(0, 0, 0) == 5.0f);

    LatentFrame f(dims, 7.0f);
    f.at(1, 2, 3) = -1.0f;
    video.set_frame(2, f);
    CHECK(video.frame_copy(2) == f);
    CHECK(video.values().back() == -1.0f);
}

TEST_CASE("shape mismatches are dimension errors") {
    LatentVideo video(2, {1, 2, 2});
    CHECK(error_kind([&] { video.set_frame(0, LatentFrame({1, 2, 3})); }) == ErrorKind::Dimension);
    CHECK(error_kind([&] { (void)video.frame(2); }) == ErrorKind::Dimension);
    CHECK(error_kind([] { LatentFrame({1, 2, 2}, std::vector<float>(3)); }) == ErrorKind::Dimension);
    CHECK(error_kind([] { require_same_shape(LatentVideo(2, {1, 1, 1}), LatentVideo(3, {1, 1, 1}), "x"); }) ==
          ErrorKind::Dimension);
}

TEST_CASE("condition set validation") {
    const Dims dims{3, 2, 2};
    ConditionSet ok{{LatentFrame(dims), LatentFrame(dims)}, {0, 15}};
    CHECK_NOTHROW(validate_conditions(ok, 16));

    ConditionSet empty;
    CHECK(error_kind([&] { validate_conditions(empty, 16); }) == ErrorKind::Config);

    ConditionSet dup{{LatentFrame(dims), LatentFrame(dims)}, {5, 5}};
    CHECK(error_message([&] { validate_conditions(dup, 16); }).find("positions strictly increasing") !=
          std::string::npos);

    ConditionSet decreasing{{LatentFrame(dims), LatentFrame(dims)}, {6, 5}};
    CHECK(error_kind([&] { validate_conditions(decreasing, 16); }) == ErrorKind::Config);

    ConditionSet out{{LatentFrame(dims)}, {16}};
    CHECK(error_message([&] { validate_conditions(out, 16); }).find("position out of range") !=
          std::string::npos);

    ConditionSet mixed{{LatentFrame(dims), LatentFrame({3, 4, 4})}, {0, 1}};
    CHECK(error_kind([&] { validate_conditions(mixed, 16); }) == ErrorKind::Dimension);

    ConditionSet counts{{LatentFrame(dims)}, {0, 1}};
    CHECK(error_kind([&] { validate_conditions(counts, 16); }).has_value());
}

TEST_CASE("identity codec passes values through") {
    Raster gray(2, 2, 0.5f);
    const LatentFrame latent = encode(gray, Codec::identity());
    CHECK(latent.dims() == Dims{3, 2, 2});
    for (float v : latent.values()) CHECK(v == 0.5f);

    const Raster zero = decode(LatentFrame({3, 2, 2}), Codec::identity());
    CHECK(zero.width == 2);
    for (float v : zero.data) CHECK(v == 0.0f);
}

TEST_CASE("patchify shape arithmetic") {
    const Codec codec = Codec::patchify(2);
    CHECK(encode(Raster(4, 4), codec).dims() == Dims{12, 2, 2});
    const Raster r = decode(LatentFrame({12, 2, 2}), codec);
    CHECK(r.width == 4);
    CHECK(r.height == 4);
    CHECK(codec.latent_dims(8, 6) == Dims{12, 3, 4});
}

TEST_CASE("patchify channel layout") {
    Raster r(4, 2);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 4; ++j) r.at(c, i, j) = static_cast<float>(100 * c + 10 * i + j);
    const LatentFrame l = encode(r, Codec::patchify(2));
    // channel (c*2 + di)*2 + dj holds pixel (c, 2i + di, 2j + dj)
    CHECK(l.at(0, 0, 0) == 0.0f);
    CHECK(l.at(1, 0, 1) == 3.0f);
    CHECK(l.at(2, 0, 0) == 10.0f);
    CHECK(l.at(7, 0, 1) == 113.0f);
    CHECK(l.at(11, 0, 0) == 211.0f);
}

TEST_CASE("codec roundtrip is bit-exact") {
    const Raster x = random_raster(8, 6, 3);
    CHECK(bit_equal(decode(encode(x, Codec::identity()), Codec::identity()), x));
    CHECK(bit_equal(decode(encode(x, Codec::patchify(2)), Codec::patchify(2)), x));

    std::vector<float> scales(12);
    for (std::size_t i = 0; i < scales.size(); ++i) scales[i] = (i % 2) ? 0.25f : 4.0f;
    const Codec scaled = Codec::patchify(2, scales);
    CHECK(bit_equal(decode(encode(x, scaled), scaled), x));

    const Raster y = random_raster(9, 9, 4);
    CHECK(bit_equal(decode(encode(y, Codec::patchify(3)), Codec::patchify(3)), y));
}

TEST_CASE("codec errors") {
    CHECK(error_kind([] { encode(Raster(5, 4), Codec::patchify(2)); }) == ErrorKind::Dimension);
    CHECK(error_kind([] { decode(LatentFrame({4, 2, 2}), Codec::identity()); }) == ErrorKind::Dimension);
    CHECK(error_kind([] { decode(LatentFrame({3, 2, 2}), Codec::patchify(2)); }) == ErrorKind::Dimension);
    CHECK(error_kind([] { Codec::patchify(0); }) == ErrorKind::Config);
    CHECK(error_kind([] { Codec::patchify(2, std::vector<float>(12, 3.0f)); }) == ErrorKind::Config);
    CHECK(error_kind([] { Codec::patchify(2, std::vector<float>(5, 1.0f)); }) == ErrorKind::Config);
}
