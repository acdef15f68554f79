#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "placeloc/error.hpp"
#include "placeloc/image.hpp"

namespace placeloc {

/// Thrown for unreadable or malformed PGM/PPM input.
class PnmError : public DataError {
public:
    enum class Kind { UnsupportedMagic, MalformedHeader, TruncatedPayload, BadSample, Io };

    PnmError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

enum class PnmEncoding { Ascii, Binary };

/// Decodes P2/P3/P5/P6 data. Samples are scaled by 1/maxval; PGM input is
/// replicated into all three channels.
Image decode_pnm(std::string_view bytes);
Image load_pnm(const std::filesystem::path& path);

/// Encodes as PPM (P3/P6) with the given maxval. Samples are rounded to the
/// nearest integer level, so 8-bit rasters round-trip exactly.
std::string encode_ppm(const Image& img, PnmEncoding encoding = PnmEncoding::Binary, int maxval = 255);
std::string encode_pgm(const GrayImage& img, PnmEncoding encoding = PnmEncoding::Binary, int maxval = 255);

void write_pnm(const std::filesystem::path& path, const Image& img, PnmEncoding encoding = PnmEncoding::Binary,
               int maxval = 255);
void write_pnm(const std::filesystem::path& path, const GrayImage& img,
               PnmEncoding encoding = PnmEncoding::Binary, int maxval = 255);

}  // namespace placeloc
