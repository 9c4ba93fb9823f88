#pragma once

// Minimal PNG reader for the writer under test: truecolor 8-bit, filter 0
// scanlines, zlib stream made of stored deflate blocks.

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testpng {

struct Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;
};

inline std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
           std::uint32_t(p[3]);
}

inline Image read_png(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (bytes.size() < 8 || !std::equal(sig, sig + 8, bytes.data()))
        throw std::runtime_error("bad PNG signature");

    Image img;
    std::vector<std::uint8_t> idat;
    std::size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t len = be32(&bytes[pos]);
        std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
        const std::uint8_t* data = &bytes[pos + 8];
        if (type == "IHDR") {
            img.width = static_cast<int>(be32(data));
            img.height = static_cast<int>(be32(data + 4));
            if (data[8] != 8 || data[9] != 2) throw std::runtime_error("not truecolor-8");
        } else if (type == "IDAT") {
            idat.insert(idat.end(), data, data + len);
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }

    // Inflate stored blocks only.
    if (idat.size() < 6) throw std::runtime_error("short zlib stream");
    std::size_t p = 2; // skip zlib header
    std::vector<std::uint8_t> raw;
    for (;;) {
        std::uint8_t hdr = idat.at(p++);
        if ((hdr & 0x06) != 0) throw std::runtime_error("not a stored block");
        std::uint16_t len = idat.at(p) | (idat.at(p + 1) << 8);
        p += 4;
        raw.insert(raw.end(), idat.begin() + p, idat.begin() + p + len);
        p += len;
        if (hdr & 1) break;
    }

    const std::size_t row_bytes = 1 + static_cast<std::size_t>(img.width) * 3;
    if (raw.size() != row_bytes * img.height) throw std::runtime_error("scanline size mismatch");
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    for (int y = 0; y < img.height; ++y) {
        if (raw[y * row_bytes] != 0) throw std::runtime_error("unexpected filter type");
        std::copy(raw.begin() + y * row_bytes + 1, raw.begin() + (y + 1) * row_bytes,
                  img.rgb.begin() + static_cast<std::size_t>(y) * img.width * 3);
    }
    return img;
}

} // namespace testpng
