#include "placeloc/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace placeloc {

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    // Returns -1 at end of input; throws on a non-digit token.
    long read_uint(PnmError::Kind kind_on_garbage, const char* field) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) return -1;
        if (!std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            throw PnmError(kind_on_garbage, std::string("pnm: expected unsigned integer for ") + field);
        }
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000'000L) throw PnmError(kind_on_garbage, std::string("pnm: value too large for ") + field);
            ++pos_;
        }
        return v;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    bool at_space() const {
        return pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]));
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

long header_field(HeaderReader& reader, const char* field) {
    const long v = reader.read_uint(PnmError::Kind::MalformedHeader, field);
    if (v < 0) throw PnmError(PnmError::Kind::MalformedHeader, std::string("pnm: header ends before ") + field);
    return v;
}

int checked_level(double v, int maxval) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("pnm: sample outside [0,1]");
    return static_cast<int>(std::lround(v * maxval));
}

void check_maxval(int maxval) {
    if (maxval < 1 || maxval > 65535) throw InvalidArgument("pnm: maxval must be in [1, 65535]");
}

void put_binary(std::string& out, int level, int maxval) {
    if (maxval > 255) out.push_back(static_cast<char>((level >> 8) & 0xff));
    out.push_back(static_cast<char>(level & 0xff));
}

std::string encode(int width, int height, int channels, const std::vector<double>& samples,
                   PnmEncoding encoding, int maxval) {
    check_maxval(maxval);
    const bool binary = encoding == PnmEncoding::Binary;
    const char* magic = channels == 3 ? (binary ? "P6" : "P3") : (binary ? "P5" : "P2");
    std::string out = std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                      std::to_string(maxval) + "\n";
    if (binary) {
        for (double s : samples) put_binary(out, checked_level(s, maxval), maxval);
    } else {
        const std::size_t per_row = static_cast<std::size_t>(width) * channels;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            out += std::to_string(checked_level(samples[i], maxval));
            out.push_back((i + 1) % per_row == 0 ? '\n' : ' ');
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PnmError(PnmError::Kind::Io, "pnm: cannot open for writing: " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw PnmError(PnmError::Kind::Io, "pnm: write failed: " + path.string());
}

}  // namespace

Image decode_pnm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw PnmError(PnmError::Kind::UnsupportedMagic, "pnm: missing 'P' magic number");
    }
    const char kind = bytes[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
        throw PnmError(PnmError::Kind::UnsupportedMagic, std::string("pnm: unsupported magic number P") + kind);
    }
    const bool binary = kind == '5' || kind == '6';
    const int channels = (kind == '3' || kind == '6') ? 3 : 1;

    HeaderReader reader(bytes);
    reader.advance(2);
    if (!reader.at_space() && reader.remaining() > 0 && bytes[2] != '#') {
        throw PnmError(PnmError::Kind::UnsupportedMagic, "pnm: unsupported magic number");
    }
    const long width = header_field(reader, "width");
    const long height = header_field(reader, "height");
    const long maxval = header_field(reader, "maxval");
    if (width < 1 || height < 1) throw PnmError(PnmError::Kind::MalformedHeader, "pnm: zero image dimension");
    if (maxval < 1 || maxval > 65535) {
        throw PnmError(PnmError::Kind::MalformedHeader, "pnm: maxval must be in [1, 65535]");
    }
    if (width * height > (1L << 28)) throw PnmError(PnmError::Kind::MalformedHeader, "pnm: image too large");

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
    std::vector<long> levels(count);
    if (binary) {
        if (!reader.at_space()) {
            throw PnmError(PnmError::Kind::MalformedHeader, "pnm: missing whitespace after maxval");
        }
        reader.advance(1);
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        if (reader.remaining() < count * bytes_per) {
            throw PnmError(PnmError::Kind::TruncatedPayload,
                           "pnm: payload has " + std::to_string(reader.remaining()) + " bytes, expected " +
                               std::to_string(count * bytes_per));
        }
        const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + reader.pos());
        for (std::size_t i = 0; i < count; ++i) {
            levels[i] = bytes_per == 2 ? (static_cast<long>(p[2 * i]) << 8) | p[2 * i + 1] : p[i];
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const long v = reader.read_uint(PnmError::Kind::BadSample, "sample");
            if (v < 0) {
                throw PnmError(PnmError::Kind::TruncatedPayload,
                               "pnm: payload has " + std::to_string(i) + " samples, expected " + std::to_string(count));
            }
            levels[i] = v;
        }
    }

    const double scale = static_cast<double>(maxval);
    std::vector<Rgb> pixels(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        for (int c = 0; c < channels; ++c) {
            if (levels[i * channels + c] > maxval) {
                throw PnmError(PnmError::Kind::BadSample, "pnm: sample exceeds maxval");
            }
        }
        if (channels == 3) {
            pixels[i] = {levels[3 * i] / scale, levels[3 * i + 1] / scale, levels[3 * i + 2] / scale};
        } else {
            const double v = levels[i] / scale;
            pixels[i] = {v, v, v};
        }
    }
    return {static_cast<int>(width), static_cast<int>(height), std::move(pixels)};
}

Image load_pnm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw PnmError(PnmError::Kind::Io, "pnm: cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_pnm(bytes);
}

std::string encode_ppm(const Image& img, PnmEncoding encoding, int maxval) {
    std::vector<double> samples;
    samples.reserve(img.size() * 3);
    for (const auto& p : img.pixels()) {
        samples.push_back(p.r);
        samples.push_back(p.g);
        samples.push_back(p.b);
    }
    return encode(img.width(), img.height(), 3, samples, encoding, maxval);
}

std::string encode_pgm(const GrayImage& img, PnmEncoding encoding, int maxval) {
    const auto v = img.values();
    return encode(img.width(), img.height(), 1, std::vector<double>(v.begin(), v.end()), encoding, maxval);
}

void write_pnm(const std::filesystem::path& path, const Image& img, PnmEncoding encoding, int maxval) {
    write_file(path, encode_ppm(img, encoding, maxval));
}

void write_pnm(const std::filesystem::path& path, const GrayImage& img, PnmEncoding encoding, int maxval) {
    write_file(path, encode_pgm(img, encoding, maxval));
}

}  // namespace placeloc
