#include "flexti2v/fileio.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <unistd.h>

#include "flexti2v/error.hpp"

namespace flexti2v {

namespace le {

void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(Bytes& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int shift = 0; shift < 64; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_f32s(Bytes& out, std::span<const float> values) {
    out.reserve(out.size() + values.size() * 4);
    for (float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint16_t get_u16(const std::uint8_t* p) noexcept {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) noexcept {
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | p[k];
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) noexcept {
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | p[k];
    return v;
}

void get_f32s(const std::uint8_t* p, std::span<float> out) noexcept {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::bit_cast<float>(get_u32(p + 4 * i));
}

}  // namespace le

namespace {

[[noreturn]] void parse_fail(const std::string& what, std::size_t offset) {
    fail(ErrorKind::Parse, what + " at byte " + std::to_string(offset));
}

class PpmHeaderReader {
public:
    explicit PpmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const noexcept { return pos_; }

    void skip_separators() {
        bool any = false;
        while (pos_ < bytes_.size()) {
            const auto ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
                any = true;
            } else if (std::isspace(ch)) {
                ++pos_;
                any = true;
            } else {
                break;
            }
        }
        if (!any) parse_fail("expected whitespace in PPM header", pos_);
    }

    std::size_t number(const char* field) {
        const std::size_t start = pos_;
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000) parse_fail(std::string("PPM ") + field + " too large", start);
            ++pos_;
        }
        if (pos_ == start) parse_fail(std::string("expected PPM ") + field, start);
        return value;
    }

    void single_whitespace() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            parse_fail("expected single whitespace after PPM maxval", pos_);
        }
        ++pos_;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint8_t quantize(float value) {
    double scaled = (static_cast<double>(value) + 1.0) * 127.5;
    scaled = std::fmin(255.0, std::fmax(0.0, scaled));
    return static_cast<std::uint8_t>(std::round(scaled));
}

void check_dim(std::uint64_t value, const char* name, std::size_t offset) {
    if (value == 0) parse_fail(std::string("LTN ") + name + " is zero", offset);
}

}  // namespace

Raster parse_ppm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
        parse_fail("bad PPM magic (expected P6)", 0);
    }
    PpmHeaderReader reader(bytes.subspan(2));
    reader.skip_separators();
    const std::size_t width = reader.number("width");
    reader.skip_separators();
    const std::size_t height = reader.number("height");
    reader.skip_separators();
    const std::size_t maxval_offset = reader.offset() + 2;
    const std::size_t maxval = reader.number("maxval");
    if (maxval != 255) parse_fail("PPM maxval must be 255", maxval_offset);
    reader.single_whitespace();
    if (width == 0 || height == 0) parse_fail("PPM has zero size", 2);

    const std::size_t header = reader.offset() + 2;
    const std::size_t needed = width * height * 3;
    if (bytes.size() - header < needed) {
        fail(ErrorKind::Parse, "truncated PPM payload at byte " + std::to_string(bytes.size()) +
                                   ": expected " + std::to_string(needed) + " bytes, got " +
                                   std::to_string(bytes.size() - header));
    }

    Raster image(width, height);
    const std::uint8_t* pixels = bytes.data() + header;
    for (std::size_t i = 0; i < height; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            for (std::size_t c = 0; c < 3; ++c) {
                const double v = pixels[(i * width + j) * 3 + c];
                image.at(c, i, j) = static_cast<float>(v / 127.5 - 1.0);
            }
        }
    }
    return image;
}

Bytes serialize_ppm(const Raster& image) {
    require(image.data.size() == 3 * image.width * image.height, ErrorKind::Dimension,
            "raster buffer does not match its size");
    const std::string header =
        "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    Bytes out(header.begin(), header.end());
    out.reserve(out.size() + image.data.size());
    for (std::size_t i = 0; i < image.height; ++i) {
        for (std::size_t j = 0; j < image.width; ++j) {
            for (std::size_t c = 0; c < 3; ++c) out.push_back(quantize(image.at(c, i, j)));
        }
    }
    return out;
}

Raster read_ppm(const std::filesystem::path& path) {
    const Bytes bytes = read_file(path);
    try {
        return parse_ppm(bytes);
    } catch (const Error& e) {
        throw e.with_context(path.string());
    }
}

void write_ppm(const Raster& image, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_ppm(image));
}

LatentVideo parse_ltn(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, "LTN1")) {
        parse_fail("bad LTN magic (expected LTN1)", 0);
    }
    if (bytes.size() < kLtnHeaderSize) {
        parse_fail("truncated LTN header: expected " + std::to_string(kLtnHeaderSize) +
                       " bytes, got " + std::to_string(bytes.size()),
                   bytes.size());
    }
    const std::uint16_t version = le::get_u16(bytes.data() + 4);
    if (version != kLtnVersion) parse_fail("unsupported LTN version " + std::to_string(version), 4);

    const std::uint64_t frames = le::get_u32(bytes.data() + 6);
    const std::uint64_t channels = le::get_u32(bytes.data() + 10);
    const std::uint64_t height = le::get_u32(bytes.data() + 14);
    const std::uint64_t width = le::get_u32(bytes.data() + 18);
    check_dim(frames, "M", 6);
    check_dim(channels, "C", 10);
    check_dim(height, "H", 14);
    check_dim(width, "W", 18);

    // Each factor is < 2^32; cap the element count well inside size_t.
    constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;
    std::uint64_t elements = frames;
    for (std::uint64_t d : {channels, height, width}) {
        if (elements > kMaxElements / d) parse_fail("LTN dims overflow", 6);
        elements *= d;
    }

    const std::uint64_t expected = elements * 4;
    const std::uint64_t actual = bytes.size() - kLtnHeaderSize;
    if (actual != expected) {
        fail(ErrorKind::Parse, "LTN payload size mismatch at byte " +
                                   std::to_string(kLtnHeaderSize) + ": expected " +
                                   std::to_string(expected) + " bytes, got " +
                                   std::to_string(actual));
    }

    const Dims dims{channels, height, width};
    std::vector<float> data(elements);
    le::get_f32s(bytes.data() + kLtnHeaderSize, data);
    return LatentVideo(frames, dims, std::move(data));
}

Bytes serialize_ltn(const LatentVideo& video) {
    Bytes out{'L', 'T', 'N', '1'};
    le::put_u16(out, kLtnVersion);
    le::put_u32(out, static_cast<std::uint32_t>(video.frames()));
    le::put_u32(out, static_cast<std::uint32_t>(video.dims().channels));
    le::put_u32(out, static_cast<std::uint32_t>(video.dims().height));
    le::put_u32(out, static_cast<std::uint32_t>(video.dims().width));
    le::put_f32s(out, video.values());
    return out;
}

LatentVideo read_ltn(const std::filesystem::path& path) {
    const Bytes bytes = read_file(path);
    try {
        return parse_ltn(bytes);
    } catch (const Error& e) {
        throw e.with_context(path.string());
    }
}

void write_ltn(const LatentVideo& video, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_ltn(video));
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorKind::Io, "read failed: " + path.string());
    return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::filesystem::path temp = path;
    temp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::Io, "cannot create " + temp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(temp, ignored);
            fail(ErrorKind::Io, "write failed: " + temp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        std::filesystem::remove(temp, ec);
        fail(ErrorKind::Io, "cannot rename into " + path.string());
    }
}

}  // namespace flexti2v
